// Derivative-free simplex minimizer. All model estimation runs through this
// on unconstrained reparameterizations, so no gradient code anywhere.
#pragma once

#include <functional>
#include <vector>

namespace dcs {

struct NmOptions {
    int max_iter = 2000;
    // Stop when the simplex f-spread falls below f_tol * (|f_best| + f_tol).
    double f_tol = 1e-8;
    // Initial simplex displacement per coordinate.
    double step = 0.25;
};

struct NmResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
};

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     std::vector<double> x0, const NmOptions& opt = {});

}  // namespace dcs
