// Time-varying correlation model: a DCC-style recursion driven either by
// standardized residuals (pearson) or by their normal scores with a
// rank-based long-run matrix (tau/rho).
#pragma once

#include "dcskeptic/garch.hpp"
#include "dcskeptic/ranks.hpp"
#include "dcskeptic/types.hpp"

namespace dcs {

struct DcsParams {
    double alpha = 0.0;
    double beta = 0.0;
};

// Full-dimension recursion
//   Q_1 = qbar,
//   Q_t = (1 - a - b) qbar + a w_{t-1} w_{t-1}' + b Q_{t-1},
//   R_t = diag(Q_t)^{-1/2} Q_t diag(Q_t)^{-1/2}.
struct DcsRecursion {
    std::vector<Matrix> q;
    std::vector<Matrix> r;
};
DcsRecursion dcs_recursion(const Matrix& driver, const Matrix& qbar, DcsParams phi);

// Pairwise composite objective over contiguous pairs (j, j+1):
//   sum_t sum_j [ log|R^(j)_t| + w^(j)_t' (R^(j)_t)^{-1} w^(j)_t ],
// run with 2x2 sub-recursions. Pair correlations are clipped to
// +/-(1 - 1e-8) before inversion. This is the quantity to MINIMIZE: it is
// the pairwise Gaussian negative log-likelihood up to additive and positive
// multiplicative constants (no 1/T averaging, constants dropped).
double composite_loglik(const Matrix& driver, const Matrix& qbar, DcsParams phi);

// Minimize composite_loglik over alpha >= 0, beta >= 0,
// alpha + beta <= 1 - 1e-4 via Nelder-Mead on logit-transformed
// (alpha, alpha + beta).
struct PhiFit {
    DcsParams phi;
    double objective = 0.0;
    int iterations = 0;
};
PhiFit estimate_phi(const Matrix& driver, const Matrix& qbar);

struct DcsModel {
    RankMethod method = RankMethod::pearson;
    DcsParams phi;
    CorrMatrix qbar;             // repaired long-run correlation
    std::vector<GarchFit> garch; // one per column
    Matrix residuals;            // standardized residuals, T x p
    Matrix driver;               // what feeds the recursion: scores or residuals
    double phi_objective = 0.0;
    bool leverage = false;
};

// Full pipeline: per-column GARCH, scores (tau/rho) or residuals (pearson),
// long-run matrix (+ nearest-correlation repair when needed), then phi.
// InputError when p < 2 or T < 200.
DcsModel fit_dcs(const Matrix& returns, RankMethod method, bool leverage = false);

// In-sample paths implied by the model.
std::vector<Matrix> correlation_series(const DcsModel& m);
std::vector<Matrix> covariance_series(const DcsModel& m); // H_t = D_t R_t D_t

// One-step-ahead covariance forecast H_{T+1} from the fitted recursions.
Matrix forecast_covariance(const DcsModel& m);

// Quasi log-likelihood of the fitted model (volatility part plus Gaussian
// correlation part evaluated on the driver panel) with per-(T*p) normalized
// information criteria:
//   aic = (-2 l + 2 k) / (T p),  bic = (-2 l + k ln T) / (T p),
// k = (3 + leverage) p + 2. Magnitudes are a documented convention; use them
// to rank models fitted on the same panel, not across datasets.
struct FitStats {
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    int n_params = 0;
};
FitStats model_loglik_aic_bic(const DcsModel& m);

}  // namespace dcs
