#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pricelab/black_scholes.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/estimators.hpp"
#include "pricelab/synth.hpp"
#include "support.hpp"

using namespace pricelab;

namespace {

struct World {
    DailyChain day;
    FitContext ctx;
};

World bs_world(double spot = 1300.0) {
    SynthSpec spec;
    spec.spot = spot;
    spec.strike_step = 25.0 * spot / 1300.0;
    World w{synth_chains(spec).front(), {}};
    w.ctx.env = w.day.env;
    w.ctx.curve = estimate_dividend_curve(w.day);
    return w;
}

std::vector<OptionQuote> puts_of(const DailyChain& day) {
    return select_kind(day, OptionKind::Put).quotes;
}

}  // namespace

TEST_CASE("label names") {
    for (auto l : kAllLabels) CHECK(parse_label(label_name(l)) == l);
    CHECK(parse_label("nw-cv") == EstimatorLabel::NWCV);
    CHECK(parse_label("BS_NW_CV") == EstimatorLabel::BSNWCV);
    CHECK_THROWS_AS(parse_label("SABR"), DomainError);
    const auto ls = parse_labels("LI, bs,LI,,nwcv");
    CHECK(ls == std::vector{EstimatorLabel::LI, EstimatorLabel::BS, EstimatorLabel::NWCV});
    CHECK_THROWS_AS(parse_labels(" , "), DomainError);
    CHECK(parse_status(status_name(PredictionStatus::Extrapolated)) ==
          PredictionStatus::Extrapolated);
}

TEST_CASE("BS label is exact on a constant-vol day") {
    const auto w = bs_world();
    const auto quotes = puts_of(w.day);
    std::vector<OptionQuote> train;
    for (std::size_t i = 0; i < quotes.size(); i += 2) train.push_back(quotes[i]);
    const auto e = PricingEstimator::fit(EstimatorLabel::BS, OptionKind::Put, train, w.ctx);
    CHECK(e.info().dropped_iv == 0);
    testing::Rng rng(107);
    int priced = 0;
    for (int k = 0; k < 300; ++k) {
        const double strike = rng.uniform(1000, 1600);
        const double tau = rng.uniform(0.03, 1.1);
        const auto p = e.predict(strike, tau);
        if (p.status == PredictionStatus::OutsideHull) {
            CHECK_FALSE(e.in_training_hull(strike, tau));
            continue;
        }
        REQUIRE(p.status == PredictionStatus::Priced);
        const double truth = bs_price({OptionKind::Put, 1300.0, strike, 0.01, 0.02, 0.2, tau});
        CHECK(std::abs(*p.price - truth) < 1e-8);
        ++priced;
    }
    CHECK(priced > 50);
    for (const auto& q : train) {
        CHECK(std::abs(*e.predict(q.strike, q.tau()).price - q.mid) <= 1e-8);
    }
}

TEST_CASE("LI at training points and outside the hull") {
    const auto w = bs_world();
    const auto quotes = puts_of(w.day);
    const auto e = PricingEstimator::fit(EstimatorLabel::LI, OptionKind::Put, quotes, w.ctx);
    for (const auto& q : quotes) {
        const auto p = e.predict(q.strike, q.tau());
        CHECK(p.status == PredictionStatus::Priced);
        CHECK(*p.price == q.mid);
    }
    const auto out = e.predict(2000.0, 0.5);
    CHECK(out.status == PredictionStatus::OutsideHull);
    CHECK_FALSE(out.price);
    CHECK_THROWS_AS(e.predict(1300.0, 0.0), DomainError);

    const std::vector<OptionQuote> two(quotes.begin(), quotes.begin() + 2);
    CHECK_THROWS_AS(PricingEstimator::fit(EstimatorLabel::LI, OptionKind::Put, two, w.ctx),
                    InsufficientData);
    CHECK_THROWS_AS(PricingEstimator::fit(EstimatorLabel::NW, OptionKind::Call, quotes, w.ctx),
                    InsufficientData);
}

TEST_CASE("NW extrapolates within the data range and flags it") {
    const auto w = bs_world();
    const auto quotes = puts_of(w.day);
    for (auto label : {EstimatorLabel::NW, EstimatorLabel::NWCV}) {
        const auto e = PricingEstimator::fit(label, OptionKind::Put, quotes, w.ctx);
        REQUIRE(e.info().bandwidths);
        CHECK(e.info().kernel_coordinates == "raw");
        double lo = 1e300;
        double hi = 0.0;
        for (const auto& q : quotes) {
            lo = std::min(lo, q.mid);
            hi = std::max(hi, q.mid);
        }
        // noiseless quotes drive the CV widths towards interpolation, so far queries may underflow
        const auto far = e.predict(1580.0, 1.05);
        if (label == EstimatorLabel::NW) CHECK(far.status == PredictionStatus::Extrapolated);
        if (far.price) {
            CHECK(far.status == PredictionStatus::Extrapolated);
            CHECK(*far.price >= lo);
            CHECK(*far.price <= hi);
        }
        const auto very_far = e.predict(1e6, 50.0);
        CHECK(very_far.status == PredictionStatus::Failed);
        CHECK_FALSE(very_far.message.empty());
        const auto inside = e.predict(quotes[3].strike, quotes[3].tau());
        CHECK(inside.status == PredictionStatus::Priced);
    }
    const std::vector<OptionQuote> one{quotes[5]};
    const auto single = PricingEstimator::fit(EstimatorLabel::NW, OptionKind::Put, one, w.ctx);
    CHECK(*single.predict(1100.0, 0.7).price == quotes[5].mid);
}

TEST_CASE("BS-NW labels price through implied vols") {
    const auto w = bs_world();
    const auto quotes = puts_of(w.day);
    for (auto label : {EstimatorLabel::BSNW, EstimatorLabel::BSNWCV}) {
        const auto e = PricingEstimator::fit(label, OptionKind::Put, quotes, w.ctx);
        const double tau = 0.4;
        const auto p = e.predict(1290.0, tau);
        const double truth = bs_price({OptionKind::Put, 1300.0, 1290.0, 0.01, 0.02, 0.2, tau});
        // a constant vol surface is reproduced by any kernel weights
        CHECK(std::abs(*p.price - truth) < 1e-8);
    }
}

TEST_CASE("BS label scales with the market") {
    const auto a = bs_world(1300.0);
    const double lambda = 2.5;
    const auto b = bs_world(1300.0 * lambda);
    const auto qa = puts_of(a.day);
    const auto qb = puts_of(b.day);
    REQUIRE(qa.size() == qb.size());
    const auto ea = PricingEstimator::fit(EstimatorLabel::BS, OptionKind::Put, qa, a.ctx);
    const auto eb = PricingEstimator::fit(EstimatorLabel::BS, OptionKind::Put, qb, b.ctx);
    testing::Rng rng(109);
    for (int k = 0; k < 100; ++k) {
        const double strike = rng.uniform(1100, 1500);
        const double tau = rng.uniform(0.06, 0.95);
        const auto pa = ea.predict(strike, tau);
        const auto pb = eb.predict(strike * lambda, tau);
        REQUIRE(pa.status == pb.status);
        if (pa.price) CHECK(*pb.price == doctest::Approx(lambda * *pa.price).epsilon(1e-9));
    }
}

TEST_CASE("LIB prices beyond LI's hull") {
    const auto w = bs_world();
    const auto quotes = puts_of(w.day);
    auto ctx = w.ctx;
    ctx.augment_strikes = strike_range(w.day);
    const auto li = PricingEstimator::fit(EstimatorLabel::LI, OptionKind::Put, quotes, ctx);
    const auto lib = PricingEstimator::fit(EstimatorLabel::LIB, OptionKind::Put, quotes, ctx);
    const double short_tau = years_from_days(10);
    CHECK(li.predict(1300.0, short_tau).status == PredictionStatus::OutsideHull);
    CHECK(lib.predict(1300.0, short_tau).status == PredictionStatus::Priced);
    testing::Rng rng(113);
    for (int k = 0; k < 200; ++k) {
        const double strike = rng.uniform(1000, 1600);
        const double tau = rng.uniform(0.0, 1.1);
        if (tau <= 0.0) continue;
        if (li.predict(strike, tau).price) CHECK(lib.predict(strike, tau).price);
    }
}

TEST_CASE("VG label reproduces VG quotes in sample") {
    SynthSpec spec;
    spec.model = SynthModel::VG;
    spec.maturities_days = {30, 91, 182};
    spec.strike_lo = 0.9;
    spec.strike_hi = 1.1;
    const auto day = synth_chains(spec).front();
    FitContext ctx;
    ctx.env = day.env;
    ctx.curve = estimate_dividend_curve(day);
    const auto quotes = puts_of(day);
    const auto e = PricingEstimator::fit(EstimatorLabel::VG, OptionKind::Put, quotes, ctx);
    REQUIRE(e.info().vg);
    for (const auto& q : quotes) {
        const auto p = e.predict(q.strike, q.tau());
        CHECK(std::abs(*p.price / q.mid - 1.0) <= 1e-3);
    }
}
