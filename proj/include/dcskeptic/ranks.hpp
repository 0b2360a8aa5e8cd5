// Rank statistics, normal scores and the sine bridges that map rank
// correlations back to Gaussian correlation, plus nearest-correlation repair.
#pragma once

#include "dcskeptic/types.hpp"

namespace dcs {

// Empirical cdf transform u_i = #{j : x_j <= x_i} / (T + 1). The T+1
// denominator keeps every u strictly inside (0,1).
Vector ecdf_transform(const Vector& x);

// Elementwise inverse normal cdf; InputError if any u is outside (0,1).
Vector normal_scores(const Vector& u);

// Column-wise ecdf -> normal scores. ranks holds the integer counts
// #{j : x_j <= x_i} that produced each score.
struct ScorePanel {
    Matrix scores;
    Eigen::MatrixXi ranks;
};
ScorePanel score_panel(const Matrix& residuals);

// Kendall tau, raw sign-pair definition: tau = S / (T(T-1)/2) where S sums
// sign(dx)*sign(dy) over pairs; tied pairs contribute zero but stay in the
// denominator. O(T log T) merge-count implementation, exactly equal to the
// O(T^2) definition (integer S). InputError on constant input or T < 2.
double kendall_tau(const Vector& x, const Vector& y);

// Spearman rho: Pearson correlation of average ranks (ties averaged).
// InputError when either side has zero rank variance.
double spearman_rho(const Vector& x, const Vector& y);

// Average ranks (1-based, ties averaged) of one column; helper shared by
// spearman_rho and the panel-level estimator.
Vector average_ranks(const Vector& x);

// Sample Pearson correlation matrix of the columns of x.
Matrix sample_correlation(const Matrix& x);

// Rank correlation matrix mapped through the sine bridges:
//   method tau: sin(pi/2 * tau_ij),  method rho: 2 sin(pi/6 * rho_ij),
// diagonal forced to one. Entries may need repair before use as a
// correlation matrix; see nearest_correlation. pearson is not accepted here.
CorrMatrix skeptic_matrix(const Matrix& panel, RankMethod method);

// Nearest correlation matrix in Frobenius norm (alternating projections with
// Dykstra correction). Input must be square and symmetric; an already-valid
// correlation matrix is returned unchanged. Stops when the largest
// elementwise change per sweep drops below tol; ConvergenceError if max_sweeps
// is exhausted first.
CorrMatrix nearest_correlation(const CorrMatrix& in, double tol = 1e-10,
                               int max_sweeps = 2000);

}  // namespace dcs
