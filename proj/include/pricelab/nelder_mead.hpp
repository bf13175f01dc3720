#pragma once

#include <functional>
#include <vector>

namespace pricelab {

struct NelderMeadOptions {
    int max_iterations = 2000;
    double f_spread_tol = 1e-10;  // stop when max f - min f over the simplex is below
    double x_size_tol = 1e-14;    // simplex considered collapsed below this (relative) size
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;  // spread criterion met
};

/// Unconstrained Nelder-Mead minimization with standard coefficients. The objective may
/// return +infinity to reject a point. `steps` gives the initial simplex edge per coordinate.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& steps,
                             NelderMeadOptions options = {});

}  // namespace pricelab
