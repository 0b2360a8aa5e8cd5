#include "dcskeptic/risk.hpp"

#include <cmath>

#include "dcskeptic/stats.hpp"

namespace dcs {

namespace {

// x log x with the 0 log 0 = 0 convention used by the coverage LRs.
double xlogx_times(double count, double prob) {
    if (count == 0.0) return 0.0;
    if (prob <= 0.0) return -std::numeric_limits<double>::infinity();
    return count * std::log(prob);
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InputError("risk: alpha must lie strictly in (0,1)");
}

}  // namespace

VarEs var_es_normal(double sigma, double alpha) {
    check_alpha(alpha);
    if (!(sigma > 0.0)) throw InputError("var_es_normal: sigma must be positive");
    double z = norm_quantile(alpha);
    VarEs out;
    out.var = -sigma * z;
    out.es = sigma * norm_pdf(z) / alpha;
    return out;
}

RiskPath portfolio_risk_path(const Vector& returns, double alpha, bool leverage) {
    check_alpha(alpha);
    RiskPath path;
    path.alpha = alpha;
    path.fit = fit_garch11(returns, leverage);
    const Eigen::Index t = returns.size();
    path.sigma = path.fit.sigma;
    path.var.resize(t);
    path.es.resize(t);
    path.var_violation.resize(static_cast<std::size_t>(t));
    path.es_violation.resize(static_cast<std::size_t>(t));
    const double z = norm_quantile(alpha);
    const double es_mult = norm_pdf(z) / alpha;
    for (Eigen::Index i = 0; i < t; ++i) {
        path.var[i] = -path.sigma[i] * z;
        path.es[i] = path.sigma[i] * es_mult;
        path.var_violation[static_cast<std::size_t>(i)] = -returns[i] > path.var[i];
        path.es_violation[static_cast<std::size_t>(i)] = -returns[i] > path.es[i];
    }
    return path;
}

TestResult kupiec_uc(const std::vector<std::uint8_t>& viol, double alpha) {
    check_alpha(alpha);
    const double n = static_cast<double>(viol.size());
    if (viol.empty()) throw InputError("kupiec_uc: empty violation series");
    double x = 0;
    for (auto v : viol) x += (v != 0);
    const double pihat = x / n;
    double ll0 = xlogx_times(n - x, 1.0 - alpha) + xlogx_times(x, alpha);
    double ll1 = xlogx_times(n - x, 1.0 - pihat) + xlogx_times(x, pihat);
    TestResult r;
    r.statistic = std::max(0.0, -2.0 * (ll0 - ll1));
    r.note = "df=1";
    r.p_value = chi2_sf(r.statistic, 1.0);
    return r;
}

TestResult christoffersen_cc(const std::vector<std::uint8_t>& viol, double alpha) {
    check_alpha(alpha);
    if (viol.size() < 2)
        throw InputError("christoffersen_cc: need at least two observations");
    double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    for (std::size_t i = 1; i < viol.size(); ++i) {
        bool prev = viol[i - 1] != 0, cur = viol[i] != 0;
        if (!prev && !cur) ++n00;
        else if (!prev && cur) ++n01;
        else if (prev && !cur) ++n10;
        else ++n11;
    }
    const double pi = (n01 + n11) / (n00 + n01 + n10 + n11);
    const double pi01 = (n00 + n01) > 0 ? n01 / (n00 + n01) : 0.0;
    const double pi11 = (n10 + n11) > 0 ? n11 / (n10 + n11) : 0.0;
    double ll0 = xlogx_times(n00 + n10, 1.0 - pi) + xlogx_times(n01 + n11, pi);
    double ll1 = xlogx_times(n00, 1.0 - pi01) + xlogx_times(n01, pi01) +
                 xlogx_times(n10, 1.0 - pi11) + xlogx_times(n11, pi11);
    double lr_ind = std::max(0.0, -2.0 * (ll0 - ll1));

    TestResult uc = kupiec_uc(viol, alpha);
    TestResult r;
    r.statistic = uc.statistic + lr_ind;
    r.note = "df=2";
    r.p_value = chi2_sf(r.statistic, 2.0);
    return r;
}

TestResult engle_dq(const std::vector<std::uint8_t>& viol, const Vector& var,
                    double alpha, int lags) {
    check_alpha(alpha);
    if (lags < 1) throw InputError("engle_dq: lags must be >= 1");
    const Eigen::Index n = static_cast<Eigen::Index>(viol.size());
    if (var.size() != n) throw InputError("engle_dq: series length mismatch");
    if (n <= lags + 2) throw InputError("engle_dq: series too short for lag count");

    const Eigen::Index rows = n - lags;
    const int cols = lags + 2;
    Matrix x(rows, cols);
    Vector y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        Eigen::Index t = i + lags;
        y[i] = (viol[static_cast<std::size_t>(t)] != 0) - alpha;
        x(i, 0) = 1.0;
        for (int l = 1; l <= lags; ++l)
            x(i, l) = (viol[static_cast<std::size_t>(t - l)] != 0) - alpha;
        x(i, cols - 1) = var[t];
    }

    Matrix xtx = x.transpose() * x;
    Vector xty = x.transpose() * y;
    Eigen::LDLT<Matrix> ldlt(xtx);
    TestResult r;
    bool ridged = false;
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= 1e-10 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
        xtx += 1e-8 * Matrix::Identity(cols, cols);
        ldlt.compute(xtx);
        ridged = true;
    }
    Vector beta = ldlt.solve(xty);
    r.statistic = std::max(0.0, beta.dot(xtx * beta) / (alpha * (1.0 - alpha)));
    double df = static_cast<double>(cols);
    r.p_value = chi2_sf(r.statistic, df);
    r.note = "df=" + std::to_string(cols) + (ridged ? ", ridge 1e-8" : "");
    return r;
}

}  // namespace dcs
