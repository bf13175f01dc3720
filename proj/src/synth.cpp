#include "pricelab/synth.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "pricelab/black_scholes.hpp"
#include "pricelab/errors.hpp"

namespace pricelab {

namespace {

bool weekend(Date d) {
    const std::chrono::weekday wd{d.days()};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

}  // namespace

double synth_price(const SynthSpec& spec, OptionKind kind, double spot, double strike,
                   double tau) {
    if (spec.model == SynthModel::BS) {
        return bs_price({kind, spot, strike, spec.rate, spec.dividend, spec.vol, tau});
    }
    const VgParams p(spec.vg_theta, spec.vg_sigma, spec.vg_alpha);
    return vg_price_quadrature({kind, spot, strike, spec.rate, spec.dividend, tau}, p);
}

std::vector<DailyChain> synth_chains(const SynthSpec& spec) {
    if (spec.model == SynthModel::VG) VgParams(spec.vg_theta, spec.vg_sigma, spec.vg_alpha);
    if (!(spec.spot > 0.0) || !(spec.strike_step > 0.0) || spec.strike_lo > spec.strike_hi ||
        !(spec.strike_lo > 0.0) || spec.days < 1 || spec.maturities_days.empty() ||
        spec.noise < 0.0) {
        throw DomainError("synth: invalid specification");
    }

    std::mt19937_64 engine(spec.seed);
    boost::random::normal_distribution<double> normal;

    const double k_lo = std::ceil(spec.strike_lo * spec.spot / spec.strike_step) * spec.strike_step;
    const double k_hi =
        std::floor(spec.strike_hi * spec.spot / spec.strike_step) * spec.strike_step;
    std::vector<double> strikes;
    for (int i = 0; k_lo + i * spec.strike_step <= k_hi + 1e-9; ++i) {
        strikes.push_back(k_lo + i * spec.strike_step);
    }
    if (strikes.empty()) throw DomainError("synth: empty strike grid");

    std::vector<DailyChain> out;
    Date date = spec.start;
    double spot = spec.spot;
    while (static_cast<int>(out.size()) < spec.days) {
        if (weekend(date)) {
            date = date.plus_days(1);
            continue;
        }
        DailyChain chain;
        chain.env = {date, spot, spec.rate, spec.div_hist};
        for (auto kind : {OptionKind::Call, OptionKind::Put}) {
            for (int ttm : spec.maturities_days) {
                const double tau = years_from_days(ttm);
                for (double k : strikes) {
                    double mid = synth_price(spec, kind, spot, k, tau);
                    double bid = mid;
                    double ask = mid;
                    if (spec.noise > 0.0) {
                        mid *= std::exp(spec.noise * normal(engine));
                        bid = mid * std::exp(-0.5 * spec.noise);
                        ask = mid * std::exp(0.5 * spec.noise);
                    }
                    chain.quotes.push_back(OptionQuote::make(kind, k, date.plus_days(ttm), ttm,
                                                             bid, ask, spec.volume));
                }
            }
        }
        sort_quotes(chain.quotes);
        out.push_back(std::move(chain));
        spot *= std::exp(spec.daily_spot_vol * normal(engine));
        date = date.plus_days(1);
    }
    return out;
}

}  // namespace pricelab
