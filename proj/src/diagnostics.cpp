#include "dcskeptic/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "dcskeptic/rng.hpp"
#include "dcskeptic/stats.hpp"

namespace dcs {

namespace {

void check_finite(const Vector& x, const char* who) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i])) throw InputError(std::string(who) + ": non-finite value");
}

double sample_sd(const Vector& x) {
    double m = x.mean();
    return std::sqrt((x.array() - m).square().sum() /
                     static_cast<double>(x.size() - 1));
}

}  // namespace

TestResult portmanteau(const Matrix& resid, int h, int k) {
    const Eigen::Index t = resid.rows(), p = resid.cols();
    if (h < 1) throw InputError("portmanteau: h must be >= 1");
    if (t <= h + 1) throw InputError("portmanteau: need T > h + 1");
    if (p < 1) throw InputError("portmanteau: empty panel");

    Matrix c0 = (resid.transpose() * resid) / static_cast<double>(t);
    Eigen::LDLT<Matrix> ldlt(c0);
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff())
        throw NumericError("portmanteau: singular lag-0 covariance");

    double q = 0.0;
    for (int i = 1; i <= h; ++i) {
        Matrix ci = (resid.bottomRows(t - i).transpose() * resid.topRows(t - i)) /
                    static_cast<double>(t);
        Matrix left = ldlt.solve(ci);              // C0^{-1} C_i
        Matrix right = ldlt.solve(ci.transpose()); // C0^{-1} C_i'
        q += (left * right).trace() / static_cast<double>(t - i);
    }
    q *= static_cast<double>(t) * static_cast<double>(t);

    TestResult r;
    r.statistic = q;
    double df = static_cast<double>(p) * p * (h - k);
    if (df < 1.0) {
        df = 1.0;
        r.note = "df floored at 1 (k >= h)";
    } else {
        r.note = "df=" + std::to_string(static_cast<long long>(df));
    }
    r.p_value = chi2_sf(q, df);
    return r;
}

TestResult jarque_bera(const Vector& x) {
    const Eigen::Index t = x.size();
    if (t < 4) throw InputError("jarque_bera: need at least 4 observations");
    check_finite(x, "jarque_bera");
    double m = x.mean();
    double m2 = 0, m3 = 0, m4 = 0;
    for (Eigen::Index i = 0; i < t; ++i) {
        double d = x[i] - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= t;
    m3 /= t;
    m4 /= t;
    if (m2 <= 0.0) throw InputError("jarque_bera: zero-variance series");
    double s = m3 / std::pow(m2, 1.5);
    double kurt = m4 / (m2 * m2);
    TestResult r;
    r.statistic = static_cast<double>(t) / 6.0 *
                  (s * s + 0.25 * (kurt - 3.0) * (kurt - 3.0));
    r.note = "df=2";
    r.p_value = chi2_sf(r.statistic, 2.0);
    return r;
}

TestResult ks_test(const Vector& x, const Reference& ref) {
    const Eigen::Index n = x.size();
    if (n < 2) throw InputError("ks_test: need at least two observations");
    check_finite(x, "ks_test");
    if (ref.kind == Reference::Kind::normal && !(ref.sigma > 0.0))
        throw InputError("ks_test: sigma must be positive");
    if (ref.kind == Reference::Kind::student_t && !(ref.nu > 0.0))
        throw InputError("ks_test: nu must be positive");

    std::vector<double> s(x.data(), x.data() + n);
    std::sort(s.begin(), s.end());
    auto cdf = [&](double v) {
        if (ref.kind == Reference::Kind::normal)
            return norm_cdf((v - ref.mu) / ref.sigma);
        return t_cdf(v, ref.nu);
    };
    double d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double f = cdf(s[static_cast<std::size_t>(i)]);
        double hi = static_cast<double>(i + 1) / n - f;
        double lo = f - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    TestResult r;
    r.statistic = d;
    r.p_value = kolmogorov_sf(std::sqrt(static_cast<double>(n)) * d);
    r.note = ref.kind == Reference::Kind::normal ? "reference=normal"
                                                 : "reference=student_t";
    return r;
}

TestResult two_sample_t(const Vector& r1, const Vector& r2) {
    const Eigen::Index n = r1.size();
    if (n != r2.size()) throw InputError("two_sample_t: series must have equal length");
    if (n < 2) throw InputError("two_sample_t: need at least two observations");
    check_finite(r1, "two_sample_t");
    check_finite(r2, "two_sample_t");
    double s1 = sample_sd(r1), s2 = sample_sd(r2);
    double denom = std::sqrt((s1 * s1 + s2 * s2) / static_cast<double>(n));
    if (!(denom > 0.0)) throw InputError("two_sample_t: zero variance in both series");
    TestResult r;
    r.statistic = (r1.mean() - r2.mean()) / denom;
    r.p_value = 2.0 * (1.0 - norm_cdf(std::fabs(r.statistic)));
    r.note = "two-sided normal";
    return r;
}

TestResult variance_f(const Vector& r1, const Vector& r2) {
    const Eigen::Index n = r1.size();
    if (n != r2.size()) throw InputError("variance_f: series must have equal length");
    if (n < 2) throw InputError("variance_f: need at least two observations");
    check_finite(r1, "variance_f");
    check_finite(r2, "variance_f");
    double s1 = sample_sd(r1), s2 = sample_sd(r2);
    if (!(s1 > 0.0) || !(s2 > 0.0))
        throw InputError("variance_f: zero-variance series");
    double f = (s1 * s1) / (s2 * s2);
    double d = static_cast<double>(n - 1);
    double lower = f_cdf(f, d, d);
    TestResult r;
    r.statistic = f;
    r.p_value = std::min(1.0, 2.0 * std::min(lower, 1.0 - lower));
    r.note = "two-sided F(" + std::to_string(n - 1) + "," + std::to_string(n - 1) + ")";
    return r;
}

TestResult sharpe_diff_bootstrap(const Vector& r1, const Vector& r2, int block_len,
                                 int n_boot, std::uint64_t seed) {
    const Eigen::Index n = r1.size();
    if (n != r2.size())
        throw InputError("sharpe_diff_bootstrap: series must have equal length");
    if (n < 20) throw InputError("sharpe_diff_bootstrap: need at least 20 observations");
    if (n_boot < 100) throw InputError("sharpe_diff_bootstrap: need at least 100 draws");
    check_finite(r1, "sharpe_diff_bootstrap");
    check_finite(r2, "sharpe_diff_bootstrap");
    if (block_len <= 0)
        block_len = static_cast<int>(std::floor(std::cbrt(static_cast<double>(n))));
    if (block_len < 1) block_len = 1;

    auto sharpe = [](const Vector& v) {
        double sd = sample_sd(v);
        if (!(sd > 0.0))
            throw InputError("sharpe_diff_bootstrap: zero-variance series");
        return v.mean() / sd;
    };
    const double dhat = sharpe(r1) - sharpe(r2);

    // Paired circular blocks: both series resampled with the same indices so
    // cross-dependence survives the resampling.
    Rng rng = Rng::substream(seed, "sharpe_boot");
    const int n_blocks = static_cast<int>((n + block_len - 1) / block_len);
    Vector b1(n), b2(n);
    int extreme = 0;
    for (int b = 0; b < n_boot; ++b) {
        Eigen::Index k = 0;
        for (int j = 0; j < n_blocks && k < n; ++j) {
            int start = rng.uniform_int(0, static_cast<int>(n) - 1);
            for (int l = 0; l < block_len && k < n; ++l, ++k) {
                Eigen::Index idx = (start + l) % n;
                b1[k] = r1[idx];
                b2[k] = r2[idx];
            }
        }
        double db;
        try {
            db = sharpe(b1) - sharpe(b2);
        } catch (const InputError&) {
            ++extreme;  // degenerate resample counts against the null
            continue;
        }
        if (std::fabs(db - dhat) >= std::fabs(dhat)) ++extreme;
    }

    TestResult r;
    r.statistic = dhat;
    r.p_value = static_cast<double>(extreme + 1) / static_cast<double>(n_boot + 1);
    r.note = "circular block bootstrap, L=" + std::to_string(block_len) +
             ", B=" + std::to_string(n_boot);
    return r;
}

}  // namespace dcs
