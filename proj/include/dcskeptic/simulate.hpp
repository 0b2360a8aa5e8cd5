// Synthetic market generator and the parameter-recovery study harness.
#pragma once

#include <cstdint>
#include <string>

#include "dcskeptic/dcs.hpp"
#include "dcskeptic/types.hpp"

namespace dcs {

// Random correlation matrix: normalized Wishart (p x df Gaussian factor)
// blended toward the identity when needed to cap the condition number.
Matrix random_correlation(int p, std::uint64_t seed, double cond_cap = 100.0,
                          int df = 0 /* 0 -> p + 2 */);

struct SimConfig {
    int p = 10;
    int t = 1000;
    double alpha = 0.02;
    double beta = 0.97;
    int nu_low = 4;    // per-asset t tail index drawn uniformly on
    int nu_high = 8;   // {nu_low, ..., nu_high}, fixed over time
    double delta = 0.0;       // contamination share of entries
    int contaminant_nu = 3;
    double garch_alpha = 0.05;  // per-asset volatility layer (unit long-run
    double garch_beta = 0.90;   // variance); set both to 0 for constant vol
    std::uint64_t seed = 1;
    Matrix qbar;  // empty -> generated from the seed
};

// Draw a T x p panel: z_t = R_t^{1/2} u_t with u entries independent
// Student-t draws scaled to unit variance, the correlation recursion driven
// by the lagged z outer products (Q_1 = qbar), and x_t = sigma_t ∘ z_t with
// a per-asset GARCH(1,1) volatility layer of unit unconditional variance.
// The square root is the symmetric eigendecomposition one. Contamination
// (when delta > 0) then replaces floor(delta*T*p) uniformly chosen entries
// with unit-variance t_{contaminant_nu} draws. Deterministic given
// cfg.seed; the path, tail indices, long-run matrix and contamination use
// separate named substreams.
Matrix simulate_panel(const SimConfig& cfg);

// Replace exactly floor(delta*T*p) entries of x (chosen without replacement)
// with unit-variance t_nu draws; delta = 0 returns x unchanged.
Matrix contaminate(const Matrix& x, double delta, int nu, std::uint64_t seed);

struct StudyConfig {
    std::vector<int> ps{10, 50};
    std::vector<int> ts{1000, 2000};
    std::vector<double> deltas{0.01, 0.10};
    int reps = 20;
    std::vector<RankMethod> estimators{RankMethod::pearson, RankMethod::rho};
    double alpha = 0.02;
    double beta = 0.97;
    std::uint64_t seed = 1;
};

// One (delta, p, T) cell: per-estimator mean and s.d. of the recovered
// (alpha, beta) over replications, NaN when undefined (reps < 2 or all
// replications failed).
struct StudyCell {
    double delta = 0.0;
    int p = 0;
    int t = 0;
    std::vector<double> mean_alpha, mean_beta, sd_alpha, sd_beta;
    std::vector<int> failures;
    // raw per-replication estimates, NaN for failed fits (est x rep)
    std::vector<std::vector<double>> alphas, betas;
};

struct StudyTable {
    StudyConfig config;
    std::vector<StudyCell> cells;
};

// Grid x replications parameter-recovery study. GARCH stages are shared
// across estimators within a replication; failed fits are recorded and
// excluded from the aggregates. Replication r of cell c draws from
// substreams keyed by (c, r), so results do not depend on evaluation order.
StudyTable monte_carlo_study(const StudyConfig& cfg);

}  // namespace dcs
