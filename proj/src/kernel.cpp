#include "pricelab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "pricelab/errors.hpp"
#include "pricelab/nelder_mead.hpp"

namespace pricelab {

namespace {

const double kLogFloor = std::log(kUnderflowFloor);
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_norm_const(Bandwidths bw) {
    return -std::log(2.0 * std::numbers::pi * bw.eps1 * bw.eps2);
}

double sample_std(std::span<const double> xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Linear-interpolation (type 7) quantile of sorted data.
double quantile7(const std::vector<double>& sorted, double prob) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> coordinate(const ScatterSample& s, bool strikes) {
    std::vector<double> out;
    out.reserve(s.points.size());
    for (const auto& p : s.points) out.push_back(strikes ? p.x : p.y);
    return out;
}

// Silverman width, or 0.9 D N^{-1/5} when the interquartile range vanishes, or 1.
double seed_width(std::span<const double> xs) {
    try {
        return silverman_rule(xs);
    } catch (const DegenerateDispersion&) {
        const double d = sample_std(xs);
        if (d > 0.0) return 0.9 * d * std::pow(static_cast<double>(xs.size()), -0.2);
        return 1.0;
    }
}

// Leave-one-out evaluation with squared coordinate gaps computed once.
class LooEvaluator {
public:
    explicit LooEvaluator(const ScatterSample& s) : n_(s.points.size()), values_(s.values) {
        dk2_.resize(n_ * n_);
        dt2_.resize(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t k = 0; k < n_; ++k) {
                const double dk = s.points[i].x - s.points[k].x;
                const double dt = s.points[i].y - s.points[k].y;
                dk2_[i * n_ + k] = dk * dk;
                dt2_[i * n_ + k] = dt * dt;
            }
        }
    }

    double operator()(Bandwidths bw) const {
        if (!(bw.eps1 > 0.0 && bw.eps2 > 0.0) || !std::isfinite(bw.eps1) ||
            !std::isfinite(bw.eps2)) {
            return kInf;
        }
        const double a = 0.5 / (bw.eps1 * bw.eps1);
        const double b = 0.5 / (bw.eps2 * bw.eps2);
        const double norm = log_norm_const(bw);
        std::vector<double> lw(n_);
        double total = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (values_[j] == 0.0) continue;
            double top = -kInf;
            for (std::size_t k = 0; k < n_; ++k) {
                if (k == j) continue;
                lw[k] = -(a * dk2_[j * n_ + k] + b * dt2_[j * n_ + k]);
                top = std::max(top, lw[k]);
            }
            double den = 0.0;
            double num = 0.0;
            for (std::size_t k = 0; k < n_; ++k) {
                if (k == j) continue;
                const double w = std::exp(lw[k] - top);
                den += w;
                num += w * values_[k];
            }
            if (!(top + std::log(den) + norm >= kLogFloor)) return kInf;
            const double est = std::max(0.0, num / den);
            const double e = 1.0 - est / values_[j];
            total += e * e;
        }
        return total;
    }

private:
    std::size_t n_;
    std::vector<double> values_;
    std::vector<double> dk2_;
    std::vector<double> dt2_;
};

}  // namespace

NwModel::NwModel(ScatterSample samples, Bandwidths bw) : samples_(std::move(samples)), bw_(bw) {
    if (samples_.points.empty()) throw InsufficientData("kernel regression needs a sample");
    if (samples_.points.size() != samples_.values.size()) {
        throw DomainError("kernel regression: points and values differ in length");
    }
    if (!(bw_.eps1 > 0.0 && bw_.eps2 > 0.0)) {
        throw DomainError("kernel regression: bandwidths must be positive");
    }
}

double NwModel::operator()(Point2 q) const {
    const std::size_t n = samples_.points.size();
    std::vector<double> lw(n);
    double top = -kInf;
    for (std::size_t k = 0; k < n; ++k) {
        const double u = (q.x - samples_.points[k].x) / bw_.eps1;
        const double v = (q.y - samples_.points[k].y) / bw_.eps2;
        lw[k] = -0.5 * (u * u + v * v);
        top = std::max(top, lw[k]);
    }
    double den = 0.0;
    double num = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = std::exp(lw[k] - top);
        den += w;
        num += w * samples_.values[k];
    }
    if (!(top + std::log(den) + log_norm_const(bw_) >= kLogFloor)) {
        throw NumericalUnderflow("kernel regression: all weights underflow at the query");
    }
    return std::max(0.0, num / den);
}

double silverman_rule(std::span<const double> xs) {
    if (xs.size() < 2) throw InsufficientData("Silverman rule needs at least 2 observations");
    const double d = sample_std(xs);
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double q = quantile7(sorted, 0.75) - quantile7(sorted, 0.25);
    if (!(d > 0.0) || !(q > 0.0)) {
        throw DegenerateDispersion("Silverman rule: zero dispersion in a coordinate");
    }
    return 0.9 * std::min(d, q / 1.34) * std::pow(static_cast<double>(xs.size()), -0.2);
}

Bandwidths silverman_bandwidths(const ScatterSample& samples) {
    const auto ks = coordinate(samples, true);
    const auto ts = coordinate(samples, false);
    return {silverman_rule(ks), silverman_rule(ts)};
}

double cv_objective(const ScatterSample& samples, Bandwidths bw) {
    if (samples.points.size() < 2) throw InsufficientData("cross-validation needs 2 samples");
    return LooEvaluator(samples)(bw);
}

CvResult loo_cv_search(const ScatterSample& samples) {
    if (samples.points.size() < 3) throw InsufficientData("cross-validation needs 3 samples");
    const LooEvaluator cv(samples);
    const auto ks = coordinate(samples, true);
    const auto ts = coordinate(samples, false);

    CvResult res;
    res.seed = {seed_width(ks), seed_width(ts)};
    res.seed_objective = cv(res.seed);

    constexpr int kGrid = 15;
    constexpr int kSeedIndex = 7;  // multiplier 1
    auto multiplier = [](int i) { return std::pow(10.0, -3.0 + 6.0 * i / (kGrid - 1)); };

    res.bw = res.seed;
    res.objective = res.seed_objective;
    // differences below this are rounding in the ratios f / p
    const double noise = 1e-24 * static_cast<double>(samples.points.size());
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
            if (i == kSeedIndex && j == kSeedIndex) continue;
            const Bandwidths bw{res.seed.eps1 * multiplier(i), res.seed.eps2 * multiplier(j)};
            const double v = cv(bw);
            if (v < res.objective - noise) {
                res.objective = v;
                res.bw = bw;
            }
        }
    }
    if (!std::isfinite(res.objective)) {
        throw NumericalUnderflow("cross-validation: every grid bandwidth underflows");
    }

    const double step = std::log(multiplier(1) / multiplier(0));
    NelderMeadOptions opts;
    opts.max_iterations = 400;
    opts.f_spread_tol = 1e-12 * std::max(1e-3, res.objective);
    const auto nm = nelder_mead(
        [&](const std::vector<double>& x) { return cv({std::exp(x[0]), std::exp(x[1])}); },
        {std::log(res.bw.eps1), std::log(res.bw.eps2)}, {step / 2.0, step / 2.0}, opts);
    if (nm.fx < res.objective - noise) {
        res.objective = nm.fx;
        res.bw = {std::exp(nm.x[0]), std::exp(nm.x[1])};
    }
    return res;
}

}  // namespace pricelab
