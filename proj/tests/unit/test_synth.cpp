#include <doctest.h>

#include <cmath>

#include "pricelab/black_scholes.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/synth.hpp"

using namespace pricelab;

TEST_CASE("noiseless BS chains invert to the generating vol") {
    SynthSpec spec;
    spec.vol = 0.27;
    spec.days = 3;
    const auto chains = synth_chains(spec);
    REQUIRE(chains.size() == 3);
    for (const auto& c : chains) {
        CHECK(c.quotes.size() == 2 * 21 * 7);  // strikes 1050..1550
        for (const auto& q : c.quotes) {
            CHECK(q.bid == q.ask);
            CHECK(q.volume == 1000);
            const double iv = implied_vol(q.kind, q.mid, c.env.spot, q.strike, c.env.rate,
                                          spec.dividend, q.tau());
            CHECK(std::abs(iv - 0.27) < 1e-8);
        }
    }
    CHECK(chains[1].env.date > chains[0].env.date);
    CHECK(chains[0].quotes.front().strike == chains[2].quotes.front().strike);
}

TEST_CASE("trading days skip weekends") {
    SynthSpec spec;
    spec.start = Date(2012, 1, 6);  // a Friday
    spec.days = 2;
    const auto chains = synth_chains(spec);
    CHECK(chains[1].env.date.iso() == "2012-01-09");
}

TEST_CASE("VG chains satisfy parity") {
    SynthSpec spec;
    spec.model = SynthModel::VG;
    spec.maturities_days = {30, 182};
    const auto day = synth_chains(spec).front();
    const auto& env = day.env;
    for (const auto& c : day.quotes) {
        if (c.kind != OptionKind::Call) continue;
        for (const auto& p : day.quotes) {
            if (p.kind != OptionKind::Put || p.strike != c.strike || p.expiry != c.expiry) continue;
            const double t = c.tau();
            const double rhs = env.spot * std::exp(-spec.dividend * t) -
                               c.strike * std::exp(-env.rate * t);
            CHECK(std::abs(c.mid - p.mid - rhs) < 1e-8 * env.spot);
        }
    }
    spec.vg_theta = 0.5;
    spec.vg_alpha = 0.5;
    CHECK_THROWS_AS(synth_chains(spec), DomainViolation);
}

TEST_CASE("noise is seeded") {
    SynthSpec spec;
    spec.noise = 0.05;
    spec.days = 2;
    const auto a = synth_chains(spec);
    const auto b = synth_chains(spec);
    CHECK(a == b);
    for (const auto& q : a.front().quotes) CHECK(q.bid < q.ask);
    spec.seed += 1;
    CHECK_FALSE(synth_chains(spec) == a);
    CHECK(synth_price(spec, OptionKind::Put, 1300, 1300, 0.5) ==
          bs_price({OptionKind::Put, 1300, 1300, 0.01, 0.02, 0.2, 0.5}));
}
