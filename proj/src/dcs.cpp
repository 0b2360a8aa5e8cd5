#include "dcskeptic/dcs.hpp"

#include <cmath>

#include "dcskeptic/nelder_mead.hpp"

namespace dcs {

namespace {

constexpr double kClip = 1.0 - 1e-8;
constexpr double kPhiCap = 1.0 - 1e-4;  // upper bound on alpha + beta

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

void check_phi(DcsParams phi) {
    if (phi.alpha < 0.0 || phi.beta < 0.0)
        throw InputError("dcs: alpha and beta must be nonnegative");
    if (phi.alpha + phi.beta >= 1.0)
        throw InputError("dcs: alpha + beta must be < 1");
}

Matrix normalize_q(const Matrix& q) {
    Vector d = q.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    return d.asDiagonal() * q * d.asDiagonal();
}

}  // namespace

DcsRecursion dcs_recursion(const Matrix& driver, const Matrix& qbar, DcsParams phi) {
    check_phi(phi);
    const Eigen::Index t = driver.rows(), p = driver.cols();
    if (p < 2) throw InputError("dcs_recursion: need at least two columns");
    if (qbar.rows() != p || qbar.cols() != p)
        throw InputError("dcs_recursion: qbar dimension mismatch");
    if (t < 1) throw InputError("dcs_recursion: empty driver");

    DcsRecursion out;
    out.q.reserve(t);
    out.r.reserve(t);
    Matrix q = qbar;
    const double c = 1.0 - phi.alpha - phi.beta;
    for (Eigen::Index i = 0; i < t; ++i) {
        if (i > 0) {
            Vector w = driver.row(i - 1).transpose();
            q = c * qbar + phi.alpha * (w * w.transpose()) + phi.beta * q;
        }
        out.q.push_back(q);
        out.r.push_back(normalize_q(q));
    }
    return out;
}

double composite_loglik(const Matrix& driver, const Matrix& qbar, DcsParams phi) {
    check_phi(phi);
    const Eigen::Index t = driver.rows(), p = driver.cols();
    if (p < 2) throw InputError("composite_loglik: need at least two columns");
    if (qbar.rows() != p || qbar.cols() != p)
        throw InputError("composite_loglik: qbar dimension mismatch");

    const double a = phi.alpha, b = phi.beta, c = 1.0 - a - b;
    double total = 0.0;
    for (Eigen::Index j = 0; j + 1 < p; ++j) {
        const double qb = qbar(j, j + 1);
        // 2x2 sub-recursion on (q11, q12, q22); unit long-run diagonal.
        double q11 = 1.0, q22 = 1.0, q12 = qb;
        for (Eigen::Index i = 0; i < t; ++i) {
            if (i > 0) {
                const double w1 = driver(i - 1, j), w2 = driver(i - 1, j + 1);
                q11 = c + a * w1 * w1 + b * q11;
                q22 = c + a * w2 * w2 + b * q22;
                q12 = c * qb + a * w1 * w2 + b * q12;
            }
            double r = q12 / std::sqrt(q11 * q22);
            if (r > kClip) r = kClip;
            if (r < -kClip) r = -kClip;
            const double det = 1.0 - r * r;
            const double w1 = driver(i, j), w2 = driver(i, j + 1);
            total += std::log(det) + (w1 * w1 - 2.0 * r * w1 * w2 + w2 * w2) / det;
        }
    }
    return total;
}

PhiFit estimate_phi(const Matrix& driver, const Matrix& qbar) {
    const Eigen::Index t = driver.rows();
    if (t < 200) throw InputError("estimate_phi: need at least 200 observations");

    // theta[0] = logit of (alpha+beta)/cap, theta[1] = logit of alpha's share.
    auto theta_to_phi = [](const std::vector<double>& th) {
        DcsParams phi;
        double s = kPhiCap * sigmoid(th[0]);
        phi.alpha = s * sigmoid(th[1]);
        phi.beta = s - phi.alpha;
        return phi;
    };
    auto objective = [&](const std::vector<double>& th) {
        return composite_loglik(driver, qbar, theta_to_phi(th));
    };

    const double a0 = 0.05, s0 = 0.95;
    std::vector<double> theta0{logit(s0 / kPhiCap), logit(a0 / s0)};
    NmOptions opt;
    opt.max_iter = 500;
    opt.f_tol = 1e-9;
    NmResult r = nelder_mead(objective, theta0, opt);
    if (!std::isfinite(r.fmin) || r.fmin >= std::numeric_limits<double>::max())
        throw ConvergenceError("estimate_phi: objective never became finite", r.x,
                               r.fmin);

    PhiFit fit;
    fit.phi = theta_to_phi(r.x);
    fit.objective = r.fmin;
    fit.iterations = r.iterations;
    return fit;
}

DcsModel fit_dcs(const Matrix& returns, RankMethod method, bool leverage) {
    const Eigen::Index t = returns.rows(), p = returns.cols();
    if (p < 2) throw InputError("fit_dcs: need at least two assets");
    if (t < 200) throw InputError("fit_dcs: need at least 200 observations");

    DcsModel m;
    m.method = method;
    m.leverage = leverage;
    m.garch.reserve(static_cast<std::size_t>(p));
    m.residuals.resize(t, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        m.garch.push_back(fit_garch11(returns.col(j), leverage));
        m.residuals.col(j) = m.garch.back().residuals;
    }

    CorrMatrix raw;
    if (method == RankMethod::pearson) {
        m.driver = m.residuals;
        raw = {sample_correlation(m.residuals), RankMethod::pearson};
    } else {
        m.driver = score_panel(m.residuals).scores;
        raw = skeptic_matrix(m.residuals, method);
    }
    m.qbar = nearest_correlation(raw);

    PhiFit pf = estimate_phi(m.driver, m.qbar.values);
    m.phi = pf.phi;
    m.phi_objective = pf.objective;
    return m;
}

std::vector<Matrix> correlation_series(const DcsModel& m) {
    return dcs_recursion(m.driver, m.qbar.values, m.phi).r;
}

std::vector<Matrix> covariance_series(const DcsModel& m) {
    DcsRecursion rec = dcs_recursion(m.driver, m.qbar.values, m.phi);
    const Eigen::Index t = m.driver.rows(), p = m.driver.cols();
    std::vector<Matrix> h;
    h.reserve(t);
    Vector d(p);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < p; ++j)
            d[j] = m.garch[static_cast<std::size_t>(j)].sigma[i];
        h.push_back(d.asDiagonal() * rec.r[static_cast<std::size_t>(i)] *
                    d.asDiagonal());
    }
    return h;
}

Matrix forecast_covariance(const DcsModel& m) {
    const Eigen::Index t = m.driver.rows(), p = m.driver.cols();
    // Q_{T+1} from the last driver row, sigma^2_{T+1} from each GARCH fit.
    DcsRecursion rec = dcs_recursion(m.driver, m.qbar.values, m.phi);
    Vector w = m.driver.row(t - 1).transpose();
    Matrix q = (1.0 - m.phi.alpha - m.phi.beta) * m.qbar.values +
               m.phi.alpha * (w * w.transpose()) + m.phi.beta * rec.q.back();
    Matrix r = q;
    {
        Vector d = q.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        r = d.asDiagonal() * q * d.asDiagonal();
    }
    Vector sig(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const GarchFit& g = m.garch[static_cast<std::size_t>(j)];
        // Inputs to the per-asset variance recursions are the raw returns;
        // reconstruct x_T = resid_T * sigma_T.
        double x_last = g.residuals[t - 1] * g.sigma[t - 1];
        double shock = (g.params.alpha1 + (x_last < 0.0 ? g.params.gamma1 : 0.0)) *
                       x_last * x_last;
        sig[j] = std::sqrt(g.params.omega + shock + g.params.beta1 * g.sigma2[t - 1]);
    }
    return sig.asDiagonal() * r * sig.asDiagonal();
}

FitStats model_loglik_aic_bic(const DcsModel& m) {
    const Eigen::Index t = m.driver.rows(), p = m.driver.cols();
    DcsRecursion rec = dcs_recursion(m.driver, m.qbar.values, m.phi);
    constexpr double kLog2Pi = 1.8378770664093453;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < t; ++i) {
        const Matrix& r = rec.r[static_cast<std::size_t>(i)];
        Eigen::LDLT<Matrix> ldlt(r);
        if (ldlt.info() != Eigen::Success)
            throw NumericError("model_loglik_aic_bic: correlation matrix not factorizable");
        double logdet = ldlt.vectorD().array().cwiseMax(1e-300).log().sum();
        Vector w = m.driver.row(i).transpose();
        double quad = w.dot(ldlt.solve(w));
        double logvol = 0.0;
        for (Eigen::Index j = 0; j < p; ++j)
            logvol += std::log(m.garch[static_cast<std::size_t>(j)].sigma2[i]);
        ll += -0.5 * (p * kLog2Pi + logvol + logdet + quad);
    }
    FitStats s;
    s.loglik = ll;
    s.n_params = (m.leverage ? 4 : 3) * static_cast<int>(p) + 2;
    const double tp = static_cast<double>(t) * static_cast<double>(p);
    s.aic = (-2.0 * ll + 2.0 * s.n_params) / tp;
    s.bic = (-2.0 * ll + s.n_params * std::log(static_cast<double>(t))) / tp;
    return s;
}

}  // namespace dcs
