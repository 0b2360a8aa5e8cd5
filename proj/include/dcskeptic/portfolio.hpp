// Global-minimum-variance portfolios, sparse precision estimation and the
// rolling rebalancing backtest.
#pragma once

#include <cstdint>

#include "dcskeptic/dcs.hpp"
#include "dcskeptic/types.hpp"

namespace dcs {

// w = H^{-1} 1 / (1' H^{-1} 1). If H fails to factorize, its correlation
// part is repaired via nearest_correlation and the volatilities reloaded on
// the diagonal; NumericError if it is still singular after repair.
Vector gmv_weights(const Matrix& h);

// L1-penalized Gaussian precision of a correlation matrix (graphical lasso,
// block coordinate descent). The diagonal is unpenalized, so lambda = 0
// reproduces the plain inverse and r = I maps to theta = I for any lambda.
// InputError when r is not a valid correlation matrix; ConvergenceError if
// the KKT residual cannot be driven below 0.5e-6.
Matrix sparse_precision(const Matrix& r, double lambda);

// Max-norm KKT residual of (r, theta, lambda); the optimality oracle:
//   diagonal:            |r_ii - w_ii|
//   theta_ij != 0:       |r_ij - w_ij + lambda sign(theta_ij)|
//   theta_ij == 0:       max(0, |r_ij - w_ij| - lambda)
// with w = theta^{-1}.
double glasso_kkt_residual(const Matrix& r, const Matrix& theta, double lambda);

// Log-spaced descending grid from the largest absolute off-diagonal entry
// of r down two decades, n points.
std::vector<double> default_lambda_grid(const Matrix& r, int n = 10);

// Stability selection over a descending lambda grid: 20-ish subsamples
// (default size floor(10 sqrt(T))), per-edge selection frequency xi,
// instability = mean over off-diagonal edges of 2 xi (1 - xi), monotonized
// by a running max along the descending grid. Returns the largest lambda
// whose monotonized instability is <= cap; if none qualifies, the largest
// lambda in the grid with capped_warning set. (Deliberately per contract:
// the conservative end of the grid, not the smallest feasible lambda.)
struct StarsResult {
    double lambda = 0.0;
    bool capped_warning = false;
    std::vector<double> instability;  // aligned with the descending grid
};
StarsResult stars_select(const Matrix& panel, const std::vector<double>& grid,
                         RankMethod method, double cap = 0.05,
                         int n_subsamples = 20, int subsample_size = 0,
                         std::uint64_t seed = 1);

enum class Estimator { dcc, dcs_tau, dcs_rho, equal_weight };
const char* estimator_name(Estimator e);

struct SparsityConfig {
    enum class Kind { none, fixed, stars } kind = Kind::none;
    double lambda = 0.0;               // fixed kind
    std::vector<double> grid;          // stars kind; empty -> default grid
    double cap = 0.05;
};

struct BacktestConfig {
    int window = 500;      // >= 200
    int holding = 21;      // days between rebalances
    Estimator estimator = Estimator::dcs_rho;
    SparsityConfig sparsity;
    bool leverage = false;
    std::uint64_t seed = 1;  // feeds stars subsampling only
};

// Rebalance-by-rebalance record of the walk-forward backtest. Daily weights
// are the start-of-day (drifted) holdings; target_weights the post-trade
// weights at each rebalance; prereb_weights the drifted holdings just before
// trading (used for drifted turnover).
struct BacktestLedger {
    int window = 0;
    int holding = 0;
    Estimator estimator = Estimator::dcs_rho;
    std::vector<int> rebalance_index;
    Matrix target_weights;   // n_reb x p
    Matrix prereb_weights;   // n_reb x p
    std::vector<int> day_index;
    Vector daily_returns;
    Matrix daily_weights;    // n_days x p
    std::vector<int> failed_rebalances;  // estimation failures (weights carried)
};

// Walk forward: at t = window, window + holding, ... fit the estimator on
// the trailing window, form the one-step covariance forecast and trade to
// GMV weights (1/p for equal_weight); hold between rebalances while weights
// drift with returns (w_i <- w_i (1+r_i) / (1+w'r)). A failed estimation
// keeps the previous weights (equal weights if it is the first window) and
// is recorded. InputError unless window >= 200, holding >= 1 and the panel
// extends at least one day past the first rebalance.
BacktestLedger rolling_backtest(const Matrix& returns, const BacktestConfig& cfg);

// Annualized performance: av = 252 * mean * 100, sd = sqrt(252) * sd * 100,
// sr = av / sd, turnover = mean L1 weight change across consecutive
// rebalances (drifted pre-trade holdings by default, raw targets otherwise).
// InputError with fewer than two rebalances or zero return variance.
struct PerfReport {
    double av = 0.0;
    double sd = 0.0;
    double sr = 0.0;
    double turnover = 0.0;
};
PerfReport performance_metrics(const BacktestLedger& ledger, bool drifted = true);

}  // namespace dcs
