#include <doctest.h>

#include <cmath>
#include <limits>

#include "pricelab/black_scholes.hpp"
#include "pricelab/errors.hpp"
#include "support.hpp"

using namespace pricelab;
using testing::rel_diff;

namespace {

// E[e^{-r t} payoff(S_T)] under the lognormal law, integrating the standard normal
// density over the region where the payoff is positive.
double integrated_price(OptionKind kind, double s, double k, double r, double q, double vol,
                        double t) {
    const double sd = vol * std::sqrt(t);
    const double drift = std::log(s) + (r - q - 0.5 * vol * vol) * t;
    const double z_star = (std::log(k) - drift) / sd;
    const double pi = std::acos(-1.0);
    auto payoff = [&](double z) {
        const double st = std::exp(drift + sd * z);
        const double dens = std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi);
        return (kind == OptionKind::Put ? k - st : st - k) * dens;
    };
    double lo = kind == OptionKind::Put ? -12.0 : z_star;
    double hi = kind == OptionKind::Put ? z_star : 12.0;
    lo = std::max(lo, -12.0);
    hi = std::min(hi, 12.0);
    if (hi <= lo) return 0.0;
    return std::exp(-r * t) * testing::simpson(payoff, lo, hi, 20000);
}

BsInputs random_inputs(testing::Rng& rng, OptionKind kind) {
    const double s = rng.uniform(50.0, 2000.0);
    return {kind,
            s,
            s * rng.uniform(0.7, 1.4),
            rng.uniform(0.0, 0.08),
            rng.uniform(0.0, 0.06),
            rng.uniform(0.08, 0.9),
            rng.uniform(0.05, 2.0)};
}

}  // namespace

TEST_CASE("standard normal helpers") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm_cdf(1.0) + norm_cdf(-1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(norm_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::acos(-1.0))));
    for (double x : {-30.0, -20.0, -5.0, 0.3, 4.0}) {
        if (norm_cdf(x) > 0.0) CHECK(rel_diff(log_norm_cdf(x), std::log(norm_cdf(x))) < 1e-12);
    }
    // far tail: log Phi(x) ~ -x^2/2 - log(-x) - log(sqrt(2 pi))
    const double x = -60.0;
    CHECK(log_norm_cdf(x) ==
          doctest::Approx(-0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::acos(-1.0)))
              .epsilon(1e-6));
    // Mills ratio continuity across the continued-fraction switch
    CHECK(rel_diff(mills_ratio(24.999999), mills_ratio(25.0)) < 1e-6);
}

TEST_CASE("prices match numerical integration of the payoff") {
    testing::Rng rng(101);
    for (int i = 0; i < 200; ++i) {
        for (auto kind : {OptionKind::Put, OptionKind::Call}) {
            const auto in = random_inputs(rng, kind);
            const double oracle =
                integrated_price(kind, in.spot, in.strike, in.rate, in.dividend, in.vol, in.tau);
            CHECK(std::abs(bs_price(in) - oracle) <= 1e-9 * in.spot);
        }
    }
}

TEST_CASE("put-call parity and no-arbitrage band") {
    testing::Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        auto call = random_inputs(rng, OptionKind::Call);
        auto put = call;
        put.kind = OptionKind::Put;
        const double lhs = bs_price(call) - bs_price(put);
        const double rhs = call.spot * std::exp(-call.dividend * call.tau) -
                           call.strike * std::exp(-call.rate * call.tau);
        CHECK(std::abs(lhs - rhs) <= 1e-11 * call.spot);
        for (const auto& in : {call, put}) {
            const auto [lo, hi] =
                no_arbitrage_bounds(in.kind, in.spot, in.strike, in.rate, in.dividend, in.tau);
            const double p = bs_price(in);
            CHECK(p >= lo);
            CHECK(p <= hi);
        }
    }
}

TEST_CASE("log price is accurate where the price underflows") {
    BsInputs in{OptionKind::Put, 100.0, 70.0, 0.01, 0.0, 0.05, 0.02};
    CHECK(bs_price(in) == 0.0);
    const double lp = bs_log_price(in);
    CHECK(std::isfinite(lp));
    CHECK(lp < -1000.0);
    // where both are representable they agree
    in.vol = 0.3;
    CHECK(rel_diff(bs_log_price(in), std::log(bs_price(in))) < 1e-12);
}

TEST_CASE("vega matches a central difference") {
    testing::Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        auto in = random_inputs(rng, i % 2 ? OptionKind::Call : OptionKind::Put);
        const double h = 1e-5;
        auto up = in;
        auto dn = in;
        up.vol += h;
        dn.vol -= h;
        const double fd = (bs_price(up) - bs_price(dn)) / (2.0 * h);
        CHECK(std::abs(vega(in) - fd) <= 1e-6 * std::max(1.0, vega(in)));
    }
}

TEST_CASE("implied vol inverts the price") {
    testing::Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const auto in = random_inputs(rng, i % 2 ? OptionKind::Call : OptionKind::Put);
        const double p = bs_price(in);
        const double vol =
            implied_vol(in.kind, p, in.spot, in.strike, in.rate, in.dividend, in.tau);
        // price residual is the contract; the vol error is scaled by 1/vega
        auto back = in;
        back.vol = vol;
        CHECK(std::abs(bs_price(back) - p) <= std::max(1e-10, 1e-14 * p));
        if (vega(in) > 1e-3 * in.spot) CHECK(std::abs(vol - in.vol) < 1e-8);
    }
}

TEST_CASE("implied vol rejects prices outside the no-arbitrage band") {
    const double s = 100.0;
    const double k = 120.0;
    const auto [lo, hi] = no_arbitrage_bounds(OptionKind::Put, s, k, 0.01, 0.0, 0.5);
    CHECK_THROWS_AS(implied_vol(OptionKind::Put, lo * 0.99, s, k, 0.01, 0.0, 0.5),
                    NoArbitrageViolation);
    CHECK_THROWS_AS(implied_vol(OptionKind::Put, hi * 1.01, s, k, 0.01, 0.0, 0.5),
                    NoArbitrageViolation);
    CHECK_THROWS_AS(implied_vol(OptionKind::Call, 0.0, s, k, 0.01, 0.0, 0.5),
                    NoArbitrageViolation);
    CHECK_THROWS_AS(implied_vol(OptionKind::Call, 1.0, s, k, 0.01, 0.0, 0.0), DomainError);
}

TEST_CASE("implied vol from a log price handles underflowing prices") {
    BsInputs in{OptionKind::Put, 100.0, 70.0, 0.01, 0.0, 0.05, 0.02};
    const double vol = implied_vol_from_log_price(in.kind, bs_log_price(in), in.spot, in.strike,
                                                  in.rate, in.dividend, in.tau);
    CHECK(std::abs(vol - 0.05) < 1e-10);
}

TEST_CASE("Black-Scholes density identity") {
    testing::Rng rng(17);
    for (int i = 0; i < 2000; ++i) {
        const auto in = random_inputs(rng, OptionKind::Call);
        const double lhs = in.spot * std::exp(-in.dividend * in.tau) * norm_pdf(in.d_plus());
        const double rhs = in.strike * std::exp(-in.rate * in.tau) * norm_pdf(in.d_minus());
        CHECK(rel_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("implied vol sensitivity to the dividend matches reprice-and-invert") {
    testing::Rng rng(23);
    for (int i = 0; i < 60; ++i) {
        const auto in = random_inputs(rng, i % 2 ? OptionKind::Call : OptionKind::Put);
        const double p = bs_price(in);
        auto central = [&](double h) {
            const double up =
                implied_vol(in.kind, p, in.spot, in.strike, in.rate, in.dividend + h, in.tau);
            const double dn =
                implied_vol(in.kind, p, in.spot, in.strike, in.rate, in.dividend - h, in.tau);
            return (up - dn) / (2.0 * h);
        };
        // Richardson step: deep in-the-money quotes with small vega bend sharply in q
        const double fd = (4.0 * central(1e-6) - central(2e-6)) / 3.0;
        const double analytic = iv_dividend_sensitivity(in);
        CHECK(rel_diff(analytic, fd) < 1e-5);
        CHECK((in.kind == OptionKind::Call ? analytic > 0.0 : analytic < 0.0));
    }
}

TEST_CASE("fill_implied_vols counts failures") {
    DailyChain day;
    day.env = {Date(2012, 3, 1), 100.0, 0.01, 0.0};
    const double good = bs_price({OptionKind::Put, 100.0, 95.0, 0.01, 0.0, 0.25, 30 / 365.0});
    day.quotes.push_back(
        OptionQuote::make(OptionKind::Put, 95.0, Date(2012, 3, 31), 30, good, good, 500));
    day.quotes.push_back(  // below intrinsic
        OptionQuote::make(OptionKind::Put, 150.0, Date(2012, 3, 31), 30, 1.0, 1.0, 500));
    day.quotes.push_back(OptionQuote::make(OptionKind::Put, 95.0, Date(2012, 3, 1), 0, 1.0, 1.0, 500));
    CHECK(fill_implied_vols(day, [](double) { return 0.0; }) == 2);
    REQUIRE(day.quotes[0].implied_vol);
    CHECK(*day.quotes[0].implied_vol == doctest::Approx(0.25).epsilon(1e-9));
    CHECK_FALSE(day.quotes[1].implied_vol);
}

TEST_CASE("limits and monotonicity") {
    CHECK(bs_price({OptionKind::Put, 100.0, 120.0, 0.0, 0.0, 0.2, 1e-9}) ==
          doctest::Approx(20.0).epsilon(1e-8));
    const double k = 120.0;
    CHECK_THROWS_AS(implied_vol(OptionKind::Put, k * std::exp(-0.02), 100.0, k, 0.02, 0.0, 1.0),
                    NoArbitrageViolation);

    BsInputs in{OptionKind::Put, 100.0, 60.0, 0.01, 0.02, 0.25, 0.75};
    double last_put = -1.0;
    double last_call = 1e9;
    for (int i = 0; i < 40; ++i) {
        in.strike = 60.0 + 2.0 * i;
        in.kind = OptionKind::Put;
        const double p = bs_price(in);
        in.kind = OptionKind::Call;
        const double c = bs_price(in);
        CHECK(p > last_put);
        CHECK(c < last_call);
        last_put = p;
        last_call = c;
    }
    in.strike = 100.0;
    double last = 0.0;
    for (double vol = 0.05; vol < 1.0; vol += 0.05) {
        in.vol = vol;
        CHECK(bs_price(in) > last);
        last = bs_price(in);
    }
    const double p1 = 3.0;
    const double p2 = 3.5;
    CHECK(implied_vol(OptionKind::Call, p1, 100, 110, 0.01, 0.0, 1.0) <
          implied_vol(OptionKind::Call, p2, 100, 110, 0.01, 0.0, 1.0));
}

TEST_CASE("vega and dividend sensitivity special values") {
    testing::Rng rng(29);
    for (int i = 0; i < 100; ++i) {
        auto call = random_inputs(rng, OptionKind::Call);
        auto put = call;
        put.kind = OptionKind::Put;
        CHECK(vega(call) == vega(put));
        CHECK(vega(call) > 0.0);
    }
    // d+ = 0 when log(S/K) = -(r - q + vol^2/2) t
    const double t = 0.8;
    const double vol = 0.3;
    const double k = 100.0 * std::exp((0.01 - 0.0 + 0.5 * vol * vol) * t);
    const BsInputs atm{OptionKind::Call, 100.0, k, 0.01, 0.0, vol, t};
    CHECK(std::abs(atm.d_plus()) < 1e-14);
    CHECK(iv_dividend_sensitivity(atm) ==
          doctest::Approx(std::sqrt(t) * std::sqrt(2.0 * std::acos(-1.0)) / 2.0).epsilon(1e-12));
}
