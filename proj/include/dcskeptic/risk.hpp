// Value-at-risk / expected-shortfall paths and coverage backtests.
#pragma once

#include "dcskeptic/diagnostics.hpp"
#include "dcskeptic/garch.hpp"
#include "dcskeptic/types.hpp"

namespace dcs {

// Gaussian tail thresholds at level alpha (loss magnitudes, both positive):
//   VaR = -sigma * Phi^{-1}(alpha),  ES = sigma * phi(Phi^{-1}(alpha)) / alpha.
struct VarEs {
    double var = 0.0;
    double es = 0.0;
};
VarEs var_es_normal(double sigma, double alpha);

// GJR-GARCH(1,1) fit on a (zero-mean) portfolio return series; the filtered
// sigma_t path is one-step-ahead by construction, giving VaR/ES series and
// violation indicators (-r_t > threshold_t).
struct RiskPath {
    double alpha = 0.0;
    Vector sigma;
    Vector var;
    Vector es;
    std::vector<std::uint8_t> var_violation;
    std::vector<std::uint8_t> es_violation;
    GarchFit fit;
};
RiskPath portfolio_risk_path(const Vector& returns, double alpha,
                             bool leverage = true);

// Kupiec unconditional coverage LR against chi^2_1 (0 log 0 = 0 convention).
TestResult kupiec_uc(const std::vector<std::uint8_t>& viol, double alpha);

// Christoffersen conditional coverage: LR_cc = LR_uc + LR_ind (first-order
// Markov independence part), against chi^2_2.
TestResult christoffersen_cc(const std::vector<std::uint8_t>& viol, double alpha);

// Engle-Manganelli dynamic quantile test: regress hits (violation - alpha) on
// a constant, `lags` lagged hits and the contemporaneous VaR level;
// DQ = b'(X'X)b / (alpha (1-alpha)) against chi^2_{lags+2}. A rank-deficient
// regressor matrix gets a 1e-8 ridge and a note.
TestResult engle_dq(const std::vector<std::uint8_t>& viol, const Vector& var,
                    double alpha, int lags = 4);

}  // namespace dcs
