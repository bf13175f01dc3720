#include "pricelab/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pricelab/errors.hpp"

namespace pricelab {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

constexpr double kVolLo = 1e-6;
constexpr double kVolHi = 5.0;
constexpr double kPriceTol = 1e-10;

// Price of the option, written as K e^{-r t} phi(d-) (R(a) - R(b)) with R the Mills
// ratio; (a, b) = (d-, d+) for puts and (-d+, -d-) for calls. Valid for every input,
// accurate when a >= 0 (out of the money in the d- sense).
double mills_log_price(const BsInputs& in, double dp, double dm) {
    const double a = in.kind == OptionKind::Put ? dm : -dp;
    const double b = in.kind == OptionKind::Put ? dp : -dm;
    const double diff = mills_ratio(a) - mills_ratio(b);
    return std::log(in.strike) - in.rate * in.tau + log_norm_pdf(dm) + std::log(diff);
}

bool use_mills_form(const BsInputs& in, double dp, double dm) {
    return in.kind == OptionKind::Put ? dm > 0.0 : dp < 0.0;
}

double log_vega(const BsInputs& in) {
    return 0.5 * std::log(in.tau) + std::log(in.spot) - in.dividend * in.tau +
           log_norm_pdf(in.d_plus());
}

double solve_log_price(OptionKind kind, double log_target, double spot, double strike, double rate,
                       double dividend, double tau) {
    BsInputs in{kind, spot, strike, rate, dividend, kVolLo, tau};
    auto g = [&](double vol) {
        in.vol = vol;
        return bs_log_price(in) - log_target;
    };

    double lo = kVolLo;
    double g_lo = g(lo);
    while (g_lo > 0.0 && lo > 1e-12) {
        lo /= 10.0;
        g_lo = g(lo);
    }
    if (g_lo > 0.0) throw NoConvergence("implied vol: price below the small-volatility limit");
    if (g_lo == 0.0) return lo;

    double hi = kVolHi;
    double g_hi = g(hi);
    while (g_hi < 0.0 && hi < 1e3) {
        hi *= 2.0;
        g_hi = g(hi);
    }
    if (g_hi < 0.0) throw NoConvergence("implied vol: bracket expansion failed");
    if (g_hi == 0.0) return hi;

    // Newton on log-price, safeguarded by the bracket.
    const double fwd_moneyness = std::log(spot / strike) + (rate - dividend) * tau;
    double vol = std::sqrt(2.0 * std::abs(fwd_moneyness) / tau);
    if (!(vol > lo && vol < hi)) vol = std::clamp(0.2, lo, hi);
    if (!(vol > lo && vol < hi)) vol = std::sqrt(lo * hi);

    for (int iter = 0; iter < 200; ++iter) {
        const double gv = g(vol);
        if (gv == 0.0) return vol;
        if (gv < 0.0) {
            lo = vol;
        } else {
            hi = vol;
        }
        in.vol = vol;
        const double slope = std::exp(log_vega(in) - bs_log_price(in));
        double next = vol - gv / slope;
        if (!std::isfinite(next) || next <= lo || next >= hi) {
            next = hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        }
        if (std::abs(next - vol) <= 1e-15 * vol || hi - lo <= 4e-16 * hi) return next;
        vol = next;
    }
    return vol;
}

}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double log_norm_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double mills_ratio(double x) {
    if (x < 25.0) return norm_cdf(-x) / norm_pdf(x);
    // Continued fraction 1/(x + 1/(x + 2/(x + 3/(x + ...)))), evaluated backwards.
    double t = x;
    for (int k = 120; k >= 1; --k) t = x + k / t;
    return 1.0 / t;
}

double log_norm_cdf(double x) {
    if (x > 0.0) return std::log1p(-norm_cdf(-x));
    if (x > -25.0) return std::log(norm_cdf(x));
    return log_norm_pdf(x) + std::log(mills_ratio(-x));
}

void BsInputs::validate() const {
    if (!(spot > 0.0)) throw DomainError("Black-Scholes: spot must be positive");
    if (!(strike > 0.0)) throw DomainError("Black-Scholes: strike must be positive");
    if (!(vol > 0.0)) throw DomainError("Black-Scholes: volatility must be positive");
    if (!(tau > 0.0)) throw DomainError("Black-Scholes: time to maturity must be positive");
}

double BsInputs::d_plus() const {
    return (std::log(spot / strike) + (rate - dividend + 0.5 * vol * vol) * tau) /
           (vol * std::sqrt(tau));
}

double BsInputs::d_minus() const { return d_plus() - vol * std::sqrt(tau); }

double bs_price(const BsInputs& in) {
    in.validate();
    const double dp = in.d_plus();
    const double dm = dp - in.vol * std::sqrt(in.tau);
    if (use_mills_form(in, dp, dm)) return std::exp(mills_log_price(in, dp, dm));
    const double fwd_spot = in.spot * std::exp(-in.dividend * in.tau);
    const double disc_strike = in.strike * std::exp(-in.rate * in.tau);
    if (in.kind == OptionKind::Call) {
        return std::max(0.0, fwd_spot * norm_cdf(dp) - disc_strike * norm_cdf(dm));
    }
    return std::max(0.0, disc_strike * norm_cdf(-dm) - fwd_spot * norm_cdf(-dp));
}

double bs_log_price(const BsInputs& in) {
    in.validate();
    const double dp = in.d_plus();
    const double dm = dp - in.vol * std::sqrt(in.tau);
    if (use_mills_form(in, dp, dm)) return mills_log_price(in, dp, dm);
    return std::log(bs_price(in));
}

double vega(const BsInputs& in) {
    in.validate();
    return std::sqrt(in.tau) * in.spot * std::exp(-in.dividend * in.tau) * norm_pdf(in.d_plus());
}

double iv_dividend_sensitivity(const BsInputs& in) {
    in.validate();
    const double dp = in.d_plus();
    const double root_t = std::sqrt(in.tau);
    // Phi(d+)/phi(d+) = R(-d+) and Phi(-d+)/phi(d+) = R(d+).
    if (in.kind == OptionKind::Call) return root_t * mills_ratio(-dp);
    return -root_t * mills_ratio(dp);
}

std::pair<double, double> no_arbitrage_bounds(OptionKind kind, double spot, double strike,
                                              double rate, double dividend, double tau) {
    const double fwd_spot = spot * std::exp(-dividend * tau);
    const double disc_strike = strike * std::exp(-rate * tau);
    if (kind == OptionKind::Call) return {std::max(0.0, fwd_spot - disc_strike), fwd_spot};
    return {std::max(0.0, disc_strike - fwd_spot), disc_strike};
}

double implied_vol(OptionKind kind, double price, double spot, double strike, double rate,
                   double dividend, double tau) {
    BsInputs{kind, spot, strike, rate, dividend, 1.0, tau}.validate();
    const auto [lower, upper] = no_arbitrage_bounds(kind, spot, strike, rate, dividend, tau);
    if (!(price > lower && price < upper)) {
        throw NoArbitrageViolation("implied vol: price outside the no-arbitrage band");
    }
    const double vol = solve_log_price(kind, std::log(price), spot, strike, rate, dividend, tau);
    const double residual = bs_price({kind, spot, strike, rate, dividend, vol, tau}) - price;
    if (!(std::abs(residual) <= std::max(kPriceTol, 1e-14 * price))) {
        throw NoConvergence("implied vol: price residual above tolerance");
    }
    return vol;
}

double implied_vol_from_log_price(OptionKind kind, double log_price, double spot, double strike,
                                  double rate, double dividend, double tau) {
    BsInputs{kind, spot, strike, rate, dividend, 1.0, tau}.validate();
    const auto [lower, upper] = no_arbitrage_bounds(kind, spot, strike, rate, dividend, tau);
    const bool above_lower = lower == 0.0 ? std::isfinite(log_price) : log_price > std::log(lower);
    if (!(above_lower && log_price < std::log(upper))) {
        throw NoArbitrageViolation("implied vol: price outside the no-arbitrage band");
    }
    return solve_log_price(kind, log_price, spot, strike, rate, dividend, tau);
}

std::size_t fill_implied_vols(DailyChain& chain, const DividendFn& dividend) {
    std::size_t failed = 0;
    for (auto& q : chain.quotes) {
        q.implied_vol.reset();
        if (q.ttm_days <= 0) {
            ++failed;
            continue;
        }
        const double tau = q.tau();
        try {
            q.implied_vol = implied_vol(q.kind, q.mid, chain.env.spot, q.strike, chain.env.rate,
                                        dividend(tau), tau);
        } catch (const Error&) {
            ++failed;
        }
    }
    return failed;
}

}  // namespace pricelab
