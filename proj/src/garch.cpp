#include "dcskeptic/garch.hpp"

#include <cmath>

#include "dcskeptic/nelder_mead.hpp"

namespace dcs {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

void check_params(const GarchParams& p) {
    if (!(p.omega > 0.0)) throw InputError("garch: omega must be positive");
    if (p.alpha1 < 0.0 || p.beta1 < 0.0 || p.gamma1 < 0.0)
        throw InputError("garch: alpha/beta/gamma must be nonnegative");
    if (!(p.init_var > 0.0)) throw InputError("garch: init_var must be positive");
    if (p.alpha1 + p.beta1 + 0.5 * p.gamma1 >= 1.0)
        throw InputError("garch: alpha1 + beta1 + gamma1/2 must be < 1");
}

void check_series(const Vector& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i])) throw InputError("garch: non-finite observation");
}

// theta -> params. Layout: theta[0] = log omega, theta[1] = logit of total
// persistence s = alpha1 + beta1 + gamma1/2, theta[2] = logit of the share of
// s taken by the ARCH side (alpha1 + gamma1/2), theta[3] (leverage only) =
// logit of alpha1's share of the ARCH side.
GarchParams theta_to_params(const std::vector<double>& theta, bool leverage,
                            double init_var) {
    GarchParams p;
    p.init_var = init_var;
    p.omega = std::exp(theta[0]);
    double s = sigmoid(theta[1]);
    double arch = s * sigmoid(theta[2]);
    p.beta1 = s - arch;
    if (leverage) {
        double share = sigmoid(theta[3]);
        p.alpha1 = arch * share;
        p.gamma1 = 2.0 * arch * (1.0 - share);
    } else {
        p.alpha1 = arch;
        p.gamma1 = 0.0;
    }
    return p;
}

double nll(const Vector& x, const GarchParams& p) {
    const Eigen::Index t = x.size();
    double s2 = p.init_var;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < t; ++i) {
        if (i > 0) {
            double shock = (p.alpha1 + (x[i - 1] < 0.0 ? p.gamma1 : 0.0)) *
                           x[i - 1] * x[i - 1];
            s2 = p.omega + shock + p.beta1 * s2;
        }
        if (!(s2 > 0.0) || !std::isfinite(s2))
            return std::numeric_limits<double>::max();
        acc += std::log(s2) + x[i] * x[i] / s2;
    }
    return 0.5 * (static_cast<double>(t) * kLog2Pi + acc);
}

}  // namespace

Vector filter_volatility(const Vector& x, const GarchParams& p) {
    check_params(p);
    check_series(x);
    const Eigen::Index t = x.size();
    if (t < 1) throw InputError("garch: empty series");
    Vector s2(t);
    s2[0] = p.init_var;
    for (Eigen::Index i = 1; i < t; ++i) {
        double shock =
            (p.alpha1 + (x[i - 1] < 0.0 ? p.gamma1 : 0.0)) * x[i - 1] * x[i - 1];
        s2[i] = p.omega + shock + p.beta1 * s2[i - 1];
    }
    return s2;
}

double garch_loglik(const Vector& x, const GarchParams& p) {
    check_params(p);
    check_series(x);
    return -nll(x, p);
}

GarchFit fit_garch11(const Vector& x, bool leverage) {
    const Eigen::Index t = x.size();
    if (t < 100) throw InputError("fit_garch11: need at least 100 observations");
    check_series(x);

    double mean = x.mean();
    double var = (x.array() - mean).square().sum() / static_cast<double>(t - 1);
    if (!(var > 0.0)) throw InputError("fit_garch11: zero-variance series");

    // Start at omega = 0.05*var, alpha = 0.05, beta = 0.90 (gamma = 0.02).
    double a0 = 0.05, b0 = 0.90, g0 = leverage ? 0.02 : 0.0;
    double s0 = a0 + b0 + 0.5 * g0;
    double arch0 = a0 + 0.5 * g0;
    std::vector<double> theta0{std::log(0.05 * var), logit(s0), logit(arch0 / s0)};
    if (leverage) theta0.push_back(logit(a0 / arch0));

    auto objective = [&](const std::vector<double>& th) {
        return nll(x, theta_to_params(th, leverage, var));
    };

    NmOptions opt;
    opt.max_iter = 2000;
    opt.f_tol = 1e-8;
    NmResult r = nelder_mead(objective, theta0, opt);
    if (!std::isfinite(r.fmin) || r.fmin >= std::numeric_limits<double>::max())
        throw ConvergenceError("fit_garch11: no finite-likelihood parameter point",
                               r.x, r.fmin);

    GarchFit fit;
    fit.params = theta_to_params(r.x, leverage, var);
    fit.sigma2 = filter_volatility(x, fit.params);
    fit.sigma = fit.sigma2.cwiseSqrt();
    fit.residuals = x.cwiseQuotient(fit.sigma);
    fit.loglik = -r.fmin;
    fit.iterations = r.iterations;
    return fit;
}

Vector standardize(const Vector& x, const Vector& sigma) {
    if (x.size() != sigma.size()) throw InputError("standardize: size mismatch");
    if ((sigma.array() <= 0.0).any())
        throw NumericError("standardize: nonpositive sigma entry");
    return x.cwiseQuotient(sigma);
}

double forecast_variance(const Vector& x, const Vector& sigma2, const GarchParams& p) {
    if (x.size() != sigma2.size() || x.size() == 0)
        throw InputError("forecast_variance: size mismatch");
    const Eigen::Index t = x.size();
    double shock =
        (p.alpha1 + (x[t - 1] < 0.0 ? p.gamma1 : 0.0)) * x[t - 1] * x[t - 1];
    return p.omega + shock + p.beta1 * sigma2[t - 1];
}

}  // namespace dcs
