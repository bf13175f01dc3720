#include "pricelab/variance_gamma.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "pricelab/black_scholes.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/nelder_mead.hpp"

namespace pricelab {

namespace {

constexpr double kQuadTargetTol = 1e-11;
constexpr double kQuadRelTol = 1e-8;
constexpr unsigned kQuadMaxDepth = 15;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Piece {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

template <typename F>
Piece integrate(F f, double a, double b) {
    Piece p;
    p.value = Kronrod::integrate(f, a, b, kQuadMaxDepth, kQuadTargetTol, &p.error, &p.l1);
    return p;
}

// Double-exponential rule for [a, b] with an endpoint singularity at a.
template <typename F>
Piece integrate_singular(F f, double a, double b) {
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    Piece p;
    p.value = rule.integrate(f, a, b, kQuadTargetTol, &p.error, &p.l1);
    return p;
}

}  // namespace

double vg_eta(double theta, double sigma, double alpha) {
    if (!VgParams::admissible(theta, sigma, alpha)) {
        throw DomainViolation("variance gamma: parameters outside theta + sigma^2/2 < alpha");
    }
    return std::log1p(-(theta + 0.5 * sigma * sigma) / alpha);
}

bool VgParams::admissible(double theta, double sigma, double alpha) {
    return std::isfinite(theta) && sigma > 0.0 && alpha > 0.0 && std::isfinite(sigma) &&
           std::isfinite(alpha) && theta + 0.5 * sigma * sigma < alpha;
}

VgParams::VgParams(double theta, double sigma, double alpha)
    : theta_(theta), sigma_(sigma), alpha_(alpha), eta_(vg_eta(theta, sigma, alpha)) {}

double gamma_expectation(const std::function<double(double)>& f, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw DomainError("gamma expectation: shape and rate must be positive");
    }
    // u = rate * G ~ Gamma(shape, 1). On [0, c] with shape < 1 the substitution v = u^shape
    // absorbs the u^{shape - 1} singularity: u^{shape-1} du = dv / shape.
    const double c = std::max(shape, 1.0);
    const double log_gamma = std::lgamma(shape);
    Piece head;
    if (shape < 1.0) {
        const double inv = 1.0 / shape;
        const double log_norm = -std::lgamma(shape + 1.0);
        head = integrate_singular(
            [&](double v) {
                const double u = std::pow(v, inv);
                const double dens = std::exp(log_norm - u);
                return dens == 0.0 ? 0.0 : f(u / rate) * dens;
            },
            0.0, std::pow(c, shape));
    } else {
        head = integrate_singular(
            [&](double u) {
                if (u <= 0.0) return shape == 1.0 ? f(0.0) * std::exp(-log_gamma) : 0.0;
                const double dens = std::exp((shape - 1.0) * std::log(u) - u - log_gamma);
                return dens == 0.0 ? 0.0 : f(u / rate) * dens;
            },
            0.0, c);
    }
    const Piece tail = integrate(
        [&](double u) {
            const double dens = std::exp((shape - 1.0) * std::log(u) - u - log_gamma);
            return dens == 0.0 ? 0.0 : f(u / rate) * dens;
        },
        c, kInf);

    const double value = head.value + tail.value;
    const double error = head.error + tail.error;
    if (!std::isfinite(value) || error > kQuadRelTol * (head.l1 + tail.l1)) {
        throw QuadratureFailure("gamma expectation: tolerance not met");
    }
    return value;
}

double vg_conditional_price(const VgContract& c, const VgParams& p, double g) {
    // Given G = g, log S_T is Gaussian: the price is Black-Scholes with spot
    // S0 exp(eta T + theta g + sigma^2 g / 2) and total variance sigma^2 g.
    const double shifted =
        c.spot * std::exp(p.eta() * c.tau + (p.theta() + 0.5 * p.sigma() * p.sigma()) * g);
    const double total_sd = p.sigma() * std::sqrt(std::max(g, 0.0));
    if (total_sd < 1e-150) {
        const double fwd = shifted * std::exp(-c.dividend * c.tau);
        const double disc = c.strike * std::exp(-c.rate * c.tau);
        return c.kind == OptionKind::Call ? std::max(fwd - disc, 0.0) : std::max(disc - fwd, 0.0);
    }
    return bs_price({c.kind, shifted, c.strike, c.rate, c.dividend, total_sd / std::sqrt(c.tau),
                     c.tau});
}

namespace {

void check_contract(const VgContract& c) {
    if (!(c.spot > 0.0) || !(c.strike > 0.0) || !(c.tau > 0.0)) {
        throw DomainError("variance gamma: spot, strike and maturity must be positive");
    }
}

}  // namespace

double vg_price_quadrature(const VgContract& c, const VgParams& p) {
    check_contract(c);
    return gamma_expectation([&](double g) { return vg_conditional_price(c, p, g); }, c.tau,
                             p.alpha());
}

std::vector<double> sample_gamma(double shape, double rate, std::size_t n, std::uint64_t seed) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw DomainError("gamma sampler: shape and rate must be positive");
    }
    std::mt19937_64 engine(seed);
    std::vector<double> out;
    out.reserve(n);
    if (shape >= 1.0) {
        boost::random::gamma_distribution<double> gamma(shape, 1.0);
        for (std::size_t i = 0; i < n; ++i) out.push_back(gamma(engine) / rate);
        return out;
    }
    // Boost the shape by one and scale by U^{1/shape}.
    boost::random::gamma_distribution<double> gamma(shape + 1.0, 1.0);
    boost::random::uniform_01<double> uniform;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = gamma(engine);
        double u = uniform(engine);
        while (u <= 0.0) u = uniform(engine);
        out.push_back(g * std::pow(u, 1.0 / shape) / rate);
    }
    return out;
}

VgMcResult vg_price_mc(const VgContract& c, const VgParams& p, long long n, std::uint64_t seed) {
    check_contract(c);
    if (n < 2) throw DomainError("variance gamma Monte Carlo: need at least 2 paths");
    const auto draws = sample_gamma(c.tau, p.alpha(), static_cast<std::size_t>(n), seed);
    double mean = 0.0;
    double m2 = 0.0;
    long long k = 0;
    for (double g : draws) {
        const double x = vg_conditional_price(c, p, g);
        ++k;
        const double delta = x - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (x - mean);
    }
    VgMcResult res;
    res.price = mean;
    res.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    res.n = n;
    res.seed = seed;
    res.square_integrable = p.square_integrable();
    return res;
}

double vg_objective(std::span<const VgQuote> quotes, OptionKind kind, double spot, double rate,
                    const VgParams& p) {
    double total = 0.0;
    for (const auto& q : quotes) {
        const double model =
            vg_price_quadrature({kind, spot, q.strike, rate, q.dividend, q.tau}, p);
        const double e = (model - q.price) / q.price;
        total += e * e;
    }
    return total;
}

VgCalibration vg_calibrate(std::span<const VgQuote> quotes, OptionKind kind, double spot,
                           double rate, VgInit init, VgCalibrationOptions options) {
    if (!VgParams::admissible(init.theta, init.sigma, init.alpha)) {
        throw DomainViolation("variance gamma calibration: initial point outside the domain");
    }
    if (quotes.empty()) throw InsufficientData("variance gamma calibration: no quotes");
    for (const auto& q : quotes) {
        if (!(q.price > 0.0) || !(q.strike > 0.0) || !(q.tau > 0.0)) {
            throw DomainError("variance gamma calibration: quotes need positive price, strike, tau");
        }
    }

    auto objective = [&](const std::vector<double>& x) {
        const double theta = x[0];
        const double sigma = std::exp(x[1]);
        const double alpha = std::exp(x[2]);
        if (!VgParams::admissible(theta, sigma, alpha)) return kInf;
        try {
            return vg_objective(quotes, kind, spot, rate, VgParams(theta, sigma, alpha));
        } catch (const Error&) {
            return kInf;
        }
    };
    const std::vector<double> steps = {0.1, 0.2, 0.2};

    int used = 0;
    auto run = [&](std::vector<double> x0, bool& ok) {
        std::vector<double> best = x0;
        double best_f = kInf;
        bool converged_once = false;
        ok = false;
        while (used < options.max_iterations) {
            NelderMeadOptions nm_opts;
            nm_opts.max_iterations = options.max_iterations - used;
            nm_opts.f_spread_tol = options.spread_tol;
            const auto nm = nelder_mead(objective, best, steps, nm_opts);
            used += nm.iterations;
            const double gain = best_f - nm.fx;
            if (nm.fx < best_f) {
                best = nm.x;
                best_f = nm.fx;
            }
            if (nm.converged && (converged_once || nm.iterations == 0) &&
                !(gain > options.spread_tol)) {
                ok = true;
                break;
            }
            converged_once = nm.converged;
            if (nm.iterations == 0) break;
        }
        return std::pair{best, best_f};
    };

    bool ok = false;
    auto [x, fx] = run({init.theta, std::log(init.sigma), std::log(init.alpha)}, ok);
    if (options.multi_start) {
        for (const auto& d : std::vector<std::array<double, 3>>{
                 {0.2, 0.0, 0.0}, {-0.2, 0.0, 0.0}, {0.0, 0.7, 0.0}, {0.0, -0.7, 0.7}}) {
            used = 0;
            bool ok2 = false;
            auto [x2, f2] = run({x[0] + d[0], x[1] + d[1], x[2] + d[2]}, ok2);
            if (ok2 && f2 < fx) {
                x = x2;
                fx = f2;
                ok = true;
            }
        }
    }
    if (!ok || !std::isfinite(fx)) {
        throw CalibrationFailure("variance gamma calibration: simplex did not converge");
    }
    VgCalibration res{VgParams(x[0], std::exp(x[1]), std::exp(x[2])), fx, used};
    return res;
}

}  // namespace pricelab
