// Shared types and error taxonomy for the dcskeptic library.
//
// Errors map onto process exit codes in the CLI: InputError -> 2,
// ConvergenceError -> 3, NumericError and anything else -> 4.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad data or bad arguments supplied by the caller.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative routine stopped without meeting its tolerance. Carries the
// best iterate seen so callers can inspect or resume.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, std::vector<double> best = {},
                     double value = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), best_point(std::move(best)), best_value(value) {}
    std::vector<double> best_point;
    double best_value;
};

// Violated internal invariant; should not occur on contract-satisfying input.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Which dependence measure drives the correlation estimate.
enum class RankMethod { tau, rho, pearson };

inline const char* rank_method_name(RankMethod m) {
    switch (m) {
        case RankMethod::tau: return "tau";
        case RankMethod::rho: return "rho";
        default: return "pearson";
    }
}

// A correlation matrix tagged with the method that produced it.
// Valid instances are symmetric with unit diagonal, entries in [-1, 1]
// and smallest eigenvalue >= -1e-8.
struct CorrMatrix {
    Matrix values;
    RankMethod method = RankMethod::pearson;
};

// T x p panel of demeaned log returns. Dates/tickers may be synthetic for
// simulated data but sizes always agree with the value matrix.
struct ReturnPanel {
    std::vector<std::string> dates;
    std::vector<std::string> tickers;
    Matrix values;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

// Throws InputError unless r is a valid correlation matrix as defined above.
// eig_floor is the tolerated lower bound on the smallest eigenvalue.
void validate_correlation(const Matrix& r, double eig_floor = -1e-8);

// true if r is square/symmetric with unit diagonal, entries in [-1,1] and
// min eigenvalue >= eig_floor (the CorrMatrix invariant), false otherwise.
bool correlation_ok(const Matrix& r, double eig_floor = -1e-8);

}  // namespace dcs
