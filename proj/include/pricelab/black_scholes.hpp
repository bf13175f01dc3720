#pragma once

#include <functional>

#include "pricelab/market_data.hpp"

namespace pricelab {

// Standard normal law.
double norm_pdf(double x);
double norm_cdf(double x);
double log_norm_pdf(double x);
/// log Phi(x), accurate far into the lower tail where Phi(x) underflows.
double log_norm_cdf(double x);
/// Mills ratio Phi(-x) / phi(x); finite for every x > -37.
double mills_ratio(double x);

/// Black-Scholes inputs with a continuous dividend yield.
struct BsInputs {
    OptionKind kind = OptionKind::Call;
    double spot = 0.0;
    double strike = 0.0;
    double rate = 0.0;
    double dividend = 0.0;
    double vol = 0.0;
    double tau = 0.0;  // years

    /// Throws DomainError unless spot, strike, vol and tau are strictly positive.
    void validate() const;
    double d_plus() const;
    double d_minus() const;
};

double bs_price(const BsInputs& in);

/// Natural log of bs_price. Stays finite for deep out-of-the-money options whose
/// price is below the smallest representable double.
double bs_log_price(const BsInputs& in);

/// dPrice/dVol = sqrt(tau) S e^{-q tau} phi(d+), the same for calls and puts.
double vega(const BsInputs& in);

/// Derivative of the implied volatility with respect to the dividend rate at fixed
/// option price: -(dPrice/dq) / (dPrice/dVol). For a call this is
/// sqrt(tau) Phi(d+) / phi(d+) > 0; for a put it is -sqrt(tau) Phi(-d+) / phi(d+).
double iv_dividend_sensitivity(const BsInputs& in);

/// Static no-arbitrage band (lower, upper) for the price of a European option.
std::pair<double, double> no_arbitrage_bounds(OptionKind kind, double spot, double strike,
                                              double rate, double dividend, double tau);

/// Volatility sigma with bs_price(sigma) == price.
///
/// The price must lie strictly inside the no-arbitrage band, otherwise
/// NoArbitrageViolation is thrown. The search starts on [1e-6, 5] and widens the
/// bracket if needed; NoConvergence is thrown when that fails or when the final price
/// residual exceeds 1e-10.
double implied_vol(OptionKind kind, double price, double spot, double strike, double rate,
                   double dividend, double tau);

/// Same as implied_vol, with the price given as its natural logarithm. Inverts
/// bs_log_price for prices too small to be represented directly.
double implied_vol_from_log_price(OptionKind kind, double log_price, double spot, double strike,
                                  double rate, double dividend, double tau);

/// Dividend rate used for a quote with the given maturity (years).
using DividendFn = std::function<double(double tau)>;

/// Fills OptionQuote::implied_vol for every quote using env.rate and `dividend(tau)`.
/// Quotes that cannot be inverted get an empty implied vol. Returns how many failed.
std::size_t fill_implied_vols(DailyChain& chain, const DividendFn& dividend);

}  // namespace pricelab
