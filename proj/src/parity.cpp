#include "pricelab/parity.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "pricelab/errors.hpp"

namespace pricelab {

namespace {

void check_leg_inputs(double spot, double strike, double tau) {
    if (!(spot > 0.0)) throw DomainError("parity: spot must be positive");
    if (!(strike > 0.0)) throw DomainError("parity: strike must be positive");
    if (!(tau > 0.0)) throw DomainError("parity: time to maturity must be positive");
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

using QuoteKey = std::tuple<Date, double>;  // (expiry, strike)

}  // namespace

ParityPrice parity_price(OptionKind target, double other_mid, double spot, double strike,
                         double rbar, double qbar, double tau) {
    check_leg_inputs(spot, strike, tau);
    const double carry = spot * std::exp(-qbar * tau) - strike * std::exp(-rbar * tau);
    const double price = target == OptionKind::Call ? other_mid + carry : other_mid - carry;
    return {price, price < 0.0};
}

double implied_dividend(const ParityLeg& leg, double spot, double rbar) {
    check_leg_inputs(spot, leg.strike, leg.tau);
    const double arg = leg.call_mid - leg.put_mid + leg.strike * std::exp(-rbar * leg.tau);
    if (!(arg > 0.0)) throw DomainError("implied dividend: non-positive log argument");
    return -std::log(arg / spot) / leg.tau;
}

double forward_price(double spot, double rbar, double qbar, double tau) {
    return spot * std::exp((rbar - qbar) * tau);
}

std::string_view moneyness_name(Moneyness m) {
    switch (m) {
        case Moneyness::ATM: return "ATM";
        case Moneyness::ITM: return "ITM";
        case Moneyness::OTM: return "OTM";
    }
    return "?";
}

MoneynessClass classify_moneyness(OptionKind kind, double strike, const MarketEnv& env, double tau,
                                  AtmBand band) {
    const double fwd = forward_price(env.spot, env.rate, env.div_hist, tau);
    MoneynessClass out;
    out.value = std::log(strike / fwd);
    if (out.value >= band.lo && out.value <= band.hi) {
        out.cls = Moneyness::ATM;
    } else if (out.value < band.lo) {
        out.cls = kind == OptionKind::Call ? Moneyness::ITM : Moneyness::OTM;
    } else {
        out.cls = kind == OptionKind::Call ? Moneyness::OTM : Moneyness::ITM;
    }
    return out;
}

DividendCurve::DividendCurve(std::vector<Knot> knots) {
    std::sort(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) { return a.tau < b.tau; });
    for (std::size_t i = 0; i < knots.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < knots.size() && knots[j].tau == knots[i].tau) sum += knots[j++].qbar;
        knots_.push_back({knots[i].tau, sum / static_cast<double>(j - i)});
        i = j;
    }
}

double DividendCurve::operator()(double tau) const {
    if (knots_.empty()) throw InsufficientData("dividend curve has no knots");
    if (tau <= knots_.front().tau) return knots_.front().qbar;
    if (tau >= knots_.back().tau) return knots_.back().qbar;
    auto hi = std::upper_bound(knots_.begin(), knots_.end(), tau,
                               [](double t, const Knot& k) { return t < k.tau; });
    auto lo = hi - 1;
    const double w = (tau - lo->tau) / (hi->tau - lo->tau);
    return lo->qbar + w * (hi->qbar - lo->qbar);
}

DividendCurve estimate_dividend_curve(const DailyChain& day, AtmBand band) {
    std::map<QuoteKey, const OptionQuote*> calls;
    std::map<QuoteKey, const OptionQuote*> puts;
    for (const auto& q : day.quotes) {
        if (q.ttm_days <= 0) continue;
        auto& side = q.kind == OptionKind::Call ? calls : puts;
        side.emplace(QuoteKey{q.expiry, q.strike}, &q);
    }

    std::map<int, std::vector<double>> by_maturity;
    for (const auto& [key, call] : calls) {
        auto it = puts.find(key);
        if (it == puts.end()) continue;
        const double tau = call->tau();
        if (classify_moneyness(OptionKind::Call, call->strike, day.env, tau, band).cls !=
            Moneyness::ATM) {
            continue;
        }
        try {
            const ParityLeg leg{call->mid, it->second->mid, call->strike, tau};
            by_maturity[call->ttm_days].push_back(implied_dividend(leg, day.env.spot, day.env.rate));
        } catch (const DomainError&) {
            // crossed or stale pair; skip
        }
    }
    if (by_maturity.empty()) {
        throw NoAtmPairs("no ATM call/put pair on " + day.env.date.iso());
    }
    std::vector<DividendCurve::Knot> knots;
    for (auto& [days, values] : by_maturity) {
        knots.push_back({years_from_days(days), median_of(std::move(values))});
    }
    return DividendCurve(std::move(knots));
}

AuditResult itm_parity_audit(const DailyChain& day, const DividendCurve& curve, AtmBand band) {
    std::map<std::tuple<Date, double, OptionKind>, const OptionQuote*> index;
    for (const auto& q : day.quotes) index.emplace(std::tuple(q.expiry, q.strike, q.kind), &q);

    AuditResult out;
    std::vector<double> errors;
    for (const auto& q : day.quotes) {
        if (q.ttm_days <= 0) continue;
        const double tau = q.tau();
        if (classify_moneyness(q.kind, q.strike, day.env, tau, band).cls != Moneyness::ITM) continue;
        const OptionKind other = q.kind == OptionKind::Call ? OptionKind::Put : OptionKind::Call;
        auto it = index.find(std::tuple(q.expiry, q.strike, other));
        if (it == index.end() || !(q.mid > 0.0)) {
            ++out.unmatched;
            continue;
        }
        const double qbar = curve.empty() ? day.env.div_hist : curve(tau);
        const double implied =
            parity_price(q.kind, it->second->mid, day.env.spot, q.strike, day.env.rate, qbar, tau)
                .price;
        const double err = std::abs((implied - q.mid) / q.mid);
        out.entries.push_back({q.kind, q.strike, q.ttm_days, q.mid, implied, err});
        errors.push_back(err);
    }
    out.report = summarize_errors(errors, "parity", "itm");
    return out;
}

}  // namespace pricelab
