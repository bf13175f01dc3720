#pragma once

#include <span>

#include "pricelab/surface.hpp"

namespace pricelab {

/// Gaussian kernel widths: eps1 along strikes, eps2 along maturities.
struct Bandwidths {
    double eps1 = 1.0;
    double eps2 = 1.0;
};

/// Nadaraya-Watson regression on raw (strike, tau) coordinates with a product Gaussian kernel.
class NwModel {
public:
    NwModel(ScatterSample samples, Bandwidths bw);

    /// Kernel-weighted average of the sample values, clamped at zero. Throws
    /// NumericalUnderflow when the kernel density at the query is below 1e-300.
    double operator()(Point2 query) const;

    const ScatterSample& samples() const { return samples_; }
    Bandwidths bandwidths() const { return bw_; }

private:
    ScatterSample samples_;
    Bandwidths bw_;
};

inline double nw_estimate(const NwModel& m, double strike, double tau) {
    return m(Point2{strike, tau});
}

inline constexpr double kUnderflowFloor = 1e-300;

/// 0.9 min(D, Q / 1.34) N^{-1/5} with D the sample standard deviation and Q the
/// interquartile range. Throws DegenerateDispersion when D or Q is zero.
double silverman_rule(std::span<const double> xs);
Bandwidths silverman_bandwidths(const ScatterSample& samples);

/// Sum over samples with nonzero value of |1 - f_{-j}(X_j) / p_j|^2, where f_{-j} is the
/// estimator fitted without sample j. +infinity when a held-out evaluation underflows.
double cv_objective(const ScatterSample& samples, Bandwidths bw);

struct CvResult {
    Bandwidths bw;
    double objective = 0.0;
    Bandwidths seed;
    double seed_objective = 0.0;
};

/// Leave-one-out bandwidths: a 15 x 15 grid of multipliers in [1e-3, 1e3] around the
/// Silverman seed, then Nelder-Mead in log-bandwidth space.
CvResult loo_cv_search(const ScatterSample& samples);
inline Bandwidths loo_cv_bandwidths(const ScatterSample& samples) {
    return loo_cv_search(samples).bw;
}

}  // namespace pricelab
