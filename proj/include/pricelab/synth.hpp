#pragma once

#include <cstdint>
#include <vector>

#include "pricelab/market_data.hpp"
#include "pricelab/variance_gamma.hpp"

namespace pricelab {

enum class SynthModel { BS, VG };

struct SynthSpec {
    SynthModel model = SynthModel::BS;
    double vol = 0.2;  // BS
    double vg_theta = -0.1;
    double vg_sigma = 0.25;
    double vg_alpha = 3.0;

    double spot = 1300.0;
    double rate = 0.01;
    double dividend = 0.02;
    double div_hist = 0.02;  // reported historical dividend

    /// Strikes from strike_lo to strike_hi (inclusive) in steps of strike_step, as
    /// multiples of the first day's spot rounded to the step.
    double strike_lo = 0.8;
    double strike_hi = 1.2;
    double strike_step = 25.0;
    std::vector<int> maturities_days = {21, 49, 77, 112, 168, 252, 365};

    /// Multiplicative lognormal noise on the price; bid and ask are the noisy price times
    /// exp(-noise / 2) and exp(noise / 2). Zero gives bid = ask = model price.
    double noise = 0.0;
    long long volume = 1000;
    std::uint64_t seed = 20120103;

    Date start{2012, 1, 3};
    int days = 1;               // trading days (weekdays)
    double daily_spot_vol = 0.01;  // random walk of the spot across days
};

/// Model price of one contract under the spec's model.
double synth_price(const SynthSpec& spec, OptionKind kind, double spot, double strike, double tau);

/// One chain per trading day. Throws DomainViolation for inadmissible VG parameters.
std::vector<DailyChain> synth_chains(const SynthSpec& spec);

}  // namespace pricelab
