// Whiteness, normality and performance-comparison tests.
#pragma once

#include <cstdint>

#include "dcskeptic/types.hpp"

namespace dcs {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::string note;  // degrees of freedom or method detail
};

// Multivariate portmanteau for serial correlation (Hosking small-sample
// form):
//   Q_h = T^2 sum_{i=1..h} (T-i)^{-1} tr(C_i' C_0^{-1} C_i C_0^{-1}),
//   C_i = (1/T) sum_t e_t e_{t-i}'.
// Null distribution chi^2 with p^2 (h - k) degrees of freedom, k the
// fitted-parameter adjustment; df is floored at one (with a note) when
// k >= h. InputError unless T > h + 1 >= 2.
TestResult portmanteau(const Matrix& resid, int h, int k = 0);

// Jarque-Bera: T/6 (S^2 + (K-3)^2/4) against chi^2_2.
TestResult jarque_bera(const Vector& x);

// Reference distribution for the KS test. Parameters are caller-supplied
// inputs (e.g. a tail index from an upstream fit), never estimated here.
struct Reference {
    enum class Kind { normal, student_t } kind = Kind::normal;
    double mu = 0.0;
    double sigma = 1.0;
    double nu = 5.0;
};

// One-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov p-value.
TestResult ks_test(const Vector& x, const Reference& ref);

// Equal-length two-sample mean comparison:
//   t = (mean1 - mean2) / sqrt((s1^2 + s2^2)/n),  two-sided normal p-value.
TestResult two_sample_t(const Vector& r1, const Vector& r2);

// Variance ratio F = s1^2/s2^2 against F(n-1, n-1), two-sided.
TestResult variance_f(const Vector& r1, const Vector& r2);

// Sharpe-ratio difference via paired circular block bootstrap: blocks of
// length block_len (default floor(n^{1/3})) resampled jointly from both
// series, difference recentered at the point estimate, two-sided p-value.
// statistic is the per-period Sharpe difference. Deterministic given seed.
TestResult sharpe_diff_bootstrap(const Vector& r1, const Vector& r2,
                                 int block_len = 0, int n_boot = 1000,
                                 std::uint64_t seed = 1);

}  // namespace dcs
