#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pricelab/error_report.hpp"
#include "pricelab/market_data.hpp"

namespace pricelab {

/// Call and put quotes sharing maturity and strike.
struct ParityLeg {
    double call_mid = 0.0;
    double put_mid = 0.0;
    double strike = 0.0;
    double tau = 0.0;  // years
};

struct ParityPrice {
    double price = 0.0;
    /// The parity price is negative, i.e. the inputs violate static no-arbitrage.
    bool arbitrage = false;
};

/// Price of `target` implied by the mid of the opposite kind through
/// C - P = S e^{-q tau} - K e^{-r tau}.
ParityPrice parity_price(OptionKind target, double other_mid, double spot, double strike,
                         double rbar, double qbar, double tau);

/// Dividend rate implied by a call/put pair:
/// q = -(1/tau) log((C - P + K e^{-r tau}) / S). Throws DomainError when the log
/// argument is not positive (crossed or stale quotes).
double implied_dividend(const ParityLeg& leg, double spot, double rbar);

/// S e^{(r - q) tau}.
double forward_price(double spot, double rbar, double qbar, double tau);

enum class Moneyness { ATM, ITM, OTM };

std::string_view moneyness_name(Moneyness m);

struct MoneynessClass {
    double value = 0.0;  // log(K / f)
    Moneyness cls = Moneyness::ATM;
};

/// ATM band on log-moneyness, closed at both ends.
struct AtmBand {
    double lo = std::log(0.95);
    double hi = std::log(1.05);
};

/// Classifies with the forward proxy f = S e^{(r - q_hist) tau}, using the historical
/// dividend so that the classification does not depend on parity-implied dividends.
MoneynessClass classify_moneyness(OptionKind kind, double strike, const MarketEnv& env, double tau,
                                  AtmBand band = {});

/// Term structure of parity-implied dividend rates. Linear inside the knot span,
/// flat (nearest knot) outside.
class DividendCurve {
public:
    struct Knot {
        double tau;
        double qbar;
    };

    DividendCurve() = default;
    /// Knots are sorted; knots with equal tau are merged by averaging.
    explicit DividendCurve(std::vector<Knot> knots);

    double operator()(double tau) const;
    const std::vector<Knot>& knots() const { return knots_; }
    bool empty() const { return knots_.empty(); }

private:
    std::vector<Knot> knots_;
};

/// One knot per maturity having at least one ATM call/put pair with identical
/// (expiry, strike); the knot is the median implied dividend of those pairs.
/// Throws NoAtmPairs when the day has none.
DividendCurve estimate_dividend_curve(const DailyChain& day, AtmBand band = {});

struct AuditEntry {
    OptionKind kind = OptionKind::Call;
    double strike = 0.0;
    int ttm_days = 0;
    double market_price = 0.0;
    double parity_price = 0.0;
    double rel_error = 0.0;  // fraction
};

struct AuditResult {
    ErrorReport report;
    std::vector<AuditEntry> entries;
    std::size_t unmatched = 0;  // ITM quotes without a traded counterpart
};

/// Compares every ITM quote with the price implied by parity from the OTM quote of
/// the other kind at the same expiry and strike, using `curve` for the dividend.
AuditResult itm_parity_audit(const DailyChain& day, const DividendCurve& curve, AtmBand band = {});

}  // namespace pricelab
