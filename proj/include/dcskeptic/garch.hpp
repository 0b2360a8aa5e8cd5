// Univariate GARCH(1,1) / GJR-GARCH(1,1) filtering and Gaussian QML fitting.
#pragma once

#include "dcskeptic/types.hpp"

namespace dcs {

struct GarchParams {
    double omega = 0.0;
    double alpha1 = 0.0;
    double beta1 = 0.0;
    double gamma1 = 0.0;   // leverage loading on negative lagged returns
    double init_var = 1.0; // sigma^2_1, the pre-sample variance
};

struct GarchFit {
    GarchParams params;
    Vector sigma2;     // conditional variances, sigma2[0] == init_var
    Vector sigma;
    Vector residuals;  // x_t / sigma_t
    double loglik = 0.0;
    int iterations = 0;
};

// Conditional variance path:
//   sigma^2_1 = init_var
//   sigma^2_t = omega + (alpha1 + gamma1 * 1[x_{t-1} < 0]) x_{t-1}^2
//             + beta1 sigma^2_{t-1},  t >= 2.
// InputError on non-finite data, nonpositive omega/init_var, negative
// alpha/beta/gamma, or alpha1 + beta1 + gamma1/2 >= 1.
Vector filter_volatility(const Vector& x, const GarchParams& p);

// Gaussian log-likelihood of x under p (full constant included).
double garch_loglik(const Vector& x, const GarchParams& p);

// Elementwise x_t / sigma_t. InputError on length mismatch, NumericError on a
// zero (or nonpositive) sigma entry.
Vector standardize(const Vector& x, const Vector& sigma);

// Gaussian QML fit via Nelder-Mead on a log/logit reparameterization that
// enforces positivity and alpha1 + beta1 + gamma1/2 < 1. init_var is pinned
// to the sample variance. Stops on relative log-likelihood change < 1e-8 or
// 2000 iterations. InputError on short (< 100) or degenerate input;
// ConvergenceError if no parameter point with finite likelihood is found.
GarchFit fit_garch11(const Vector& x, bool leverage = false);

// One-step-ahead variance forecast sigma^2_{T+1} given the fitted path.
double forecast_variance(const Vector& x, const Vector& sigma2, const GarchParams& p);

}  // namespace dcs
