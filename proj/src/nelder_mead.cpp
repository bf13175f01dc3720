#include "pricelab/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pricelab/errors.hpp"

namespace pricelab {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& steps,
                             NelderMeadOptions options) {
    const std::size_t n = x0.size();
    if (n == 0 || steps.size() != n) throw DomainError("nelder_mead: bad dimensions");

    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    auto point = [&](double t, const std::vector<double>& from, std::vector<double>& out) {
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (from[j] - centroid[j]);
    };

    for (;;) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        const double spread = fv[worst] - fv[best];
        if (std::isfinite(fv[worst]) && spread <= options.f_spread_tol) {
            res.converged = true;
            break;
        }
        double size = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                size = std::max(size, std::abs(simplex[i][j] - simplex[best][j]));
                scale = std::max(scale, std::abs(simplex[best][j]));
            }
        }
        if (size <= options.x_size_tol * std::max(1.0, scale)) break;
        if (res.iterations >= options.max_iterations) break;
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;
        }

        point(-1.0, simplex[worst], trial);
        const double fr = eval(trial);
        if (fr < fv[best]) {
            point(-2.0, simplex[worst], trial2);
            const double fe = eval(trial2);
            if (fe < fr) {
                simplex[worst] = trial2;
                fv[worst] = fe;
            } else {
                simplex[worst] = trial;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = trial;
            fv[worst] = fr;
            continue;
        }
        if (fr < fv[worst]) {
            point(-0.5, simplex[worst], trial2);  // outside contraction
            const double fc = eval(trial2);
            if (fc <= fr) {
                simplex[worst] = trial2;
                fv[worst] = fc;
                continue;
            }
        } else {
            point(0.5, simplex[worst], trial2);  // inside contraction
            const double fc = eval(trial2);
            if (fc < fv[worst]) {
                simplex[worst] = trial2;
                fv[worst] = fc;
                continue;
            }
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) {
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            }
            fv[i] = eval(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = simplex[best];
    res.fx = fv[best];
    return res;
}

}  // namespace pricelab
