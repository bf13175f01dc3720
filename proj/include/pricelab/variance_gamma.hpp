#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pricelab/market_data.hpp"

namespace pricelab {

/// log(1 - (theta + sigma^2/2) / alpha). Throws DomainViolation outside the admissible domain.
double vg_eta(double theta, double sigma, double alpha);

class VgParams {
public:
    /// Throws DomainViolation unless sigma > 0, alpha > 0 and theta + sigma^2/2 < alpha.
    VgParams(double theta, double sigma, double alpha);

    static bool admissible(double theta, double sigma, double alpha);

    double theta() const { return theta_; }
    double sigma() const { return sigma_; }
    double alpha() const { return alpha_; }
    double eta() const { return eta_; }
    /// 2 theta + sigma^2 < alpha: the discounted payoff has a finite second moment.
    bool square_integrable() const { return 2.0 * theta_ + sigma_ * sigma_ < alpha_; }

private:
    double theta_;
    double sigma_;
    double alpha_;
    double eta_;
};

/// E[f(G)] for G ~ Gamma(shape, rate) (mean shape / rate), by adaptive Gauss-Kronrod
/// quadrature. Throws QuadratureFailure when the relative error estimate exceeds 1e-8.
double gamma_expectation(const std::function<double(double)>& f, double shape, double rate);

struct VgContract {
    OptionKind kind = OptionKind::Put;
    double spot = 0.0;
    double strike = 0.0;
    double rate = 0.0;
    double dividend = 0.0;
    double tau = 0.0;
};

/// Black-Scholes price conditional on the subordinator value G: the integrand of the
/// pricing formula. Finite limits are used at G = 0.
double vg_conditional_price(const VgContract& c, const VgParams& p, double g);

double vg_price_quadrature(const VgContract& c, const VgParams& p);

struct VgMcResult {
    double price = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
    long long n = 0;
    std::uint64_t seed = 0;
    bool square_integrable = true;  // the standard error is meaningful
};

inline constexpr long long kDefaultMcPaths = 10000;

VgMcResult vg_price_mc(const VgContract& c, const VgParams& p, long long n = kDefaultMcPaths,
                       std::uint64_t seed = 20120103);

/// Draws n Gamma(shape, rate) variates; the sampler behind vg_price_mc.
std::vector<double> sample_gamma(double shape, double rate, std::size_t n, std::uint64_t seed);

struct VgQuote {
    double strike = 0.0;
    double tau = 0.0;
    double price = 0.0;
    double dividend = 0.0;
};

struct VgInit {
    double theta = 0.0;
    double sigma = 0.3;
    double alpha = 2.0;
};

struct VgCalibrationOptions {
    int max_iterations = 2000;
    double spread_tol = 1e-10;
    /// Extra starts around the best point, for diagnostics. Off by default.
    bool multi_start = false;
};

struct VgCalibration {
    VgParams params;
    double objective = 0.0;
    int iterations = 0;
};

/// Sum over quotes of ((price_VG - p) / p)^2.
double vg_objective(std::span<const VgQuote> quotes, OptionKind kind, double spot, double rate,
                    const VgParams& p);

/// Nelder-Mead on (theta, log sigma, log alpha) with an infinite barrier outside the
/// admissible domain. Throws DomainViolation for an inadmissible init and
/// CalibrationFailure when the objective spread does not reach the tolerance.
VgCalibration vg_calibrate(std::span<const VgQuote> quotes, OptionKind kind, double spot,
                           double rate, VgInit init = {}, VgCalibrationOptions options = {});

}  // namespace pricelab
