#include "dcskeptic/simulate.hpp"

#include <cmath>

#include "dcskeptic/rng.hpp"

namespace dcs {

Matrix random_correlation(int p, std::uint64_t seed, double cond_cap, int df) {
    if (p < 1) throw InputError("random_correlation: p must be positive");
    if (df <= 0) df = p + 2;
    if (!(cond_cap > 1.0)) throw InputError("random_correlation: cond_cap must exceed 1");
    Rng rng = Rng::substream(seed, "wishart");
    Matrix a(p, df);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < df; ++j) a(i, j) = rng.normal();
    Matrix s = a * a.transpose();
    Vector d = s.diagonal().cwiseSqrt().cwiseInverse();
    Matrix c = d.asDiagonal() * s * d.asDiagonal();
    c = 0.5 * (c + c.transpose());
    c.diagonal().setOnes();

    Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0 || lmax / lmin > cond_cap) {
        // Blend toward the identity just enough to hit the cap:
        // eigenvalues become g*lambda + (1-g).
        double g = (cond_cap - 1.0) / (lmax - 1.0 + cond_cap * (1.0 - lmin));
        if (g < 0.0) g = 0.0;
        if (g > 1.0) g = 1.0;
        c = g * c + (1.0 - g) * Matrix::Identity(p, p);
    }
    return c;
}

Matrix simulate_panel(const SimConfig& cfg) {
    if (cfg.p < 2) throw InputError("simulate_panel: p must be >= 2");
    if (cfg.t < 2) throw InputError("simulate_panel: t must be >= 2");
    if (cfg.nu_low < 3 || cfg.nu_high < cfg.nu_low)
        throw InputError("simulate_panel: need 3 <= nu_low <= nu_high");
    if (cfg.alpha < 0.0 || cfg.beta < 0.0 || cfg.alpha + cfg.beta >= 1.0)
        throw InputError("simulate_panel: invalid (alpha, beta)");
    if (cfg.delta < 0.0 || cfg.delta > 1.0)
        throw InputError("simulate_panel: delta must lie in [0, 1]");
    if (cfg.garch_alpha < 0.0 || cfg.garch_beta < 0.0 ||
        cfg.garch_alpha + cfg.garch_beta >= 1.0)
        throw InputError("simulate_panel: invalid volatility layer (a, b)");

    const int p = cfg.p, t = cfg.t;
    Matrix qbar = cfg.qbar;
    if (qbar.size() == 0) {
        qbar = random_correlation(p, Rng::substream(cfg.seed, "qbar").raw());
    } else if (qbar.rows() != p || qbar.cols() != p) {
        throw InputError("simulate_panel: qbar dimension mismatch");
    }

    Rng nu_rng = Rng::substream(cfg.seed, "nu");
    std::vector<int> nu(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) nu[static_cast<std::size_t>(j)] =
        nu_rng.uniform_int(cfg.nu_low, cfg.nu_high);

    Rng path = Rng::substream(cfg.seed, "path");
    Matrix x(t, p);
    Matrix z(t, p);  // devolatized innovations drive the correlation recursion
    Matrix q = qbar;
    Vector u(p);
    // Per-asset GARCH(1,1) volatility layer with unit unconditional variance.
    const double vol_omega = 1.0 - cfg.garch_alpha - cfg.garch_beta;
    Vector sigma2 = Vector::Ones(p);
    const double c = 1.0 - cfg.alpha - cfg.beta;
    for (int i = 0; i < t; ++i) {
        if (i > 0) {
            Vector w = z.row(i - 1).transpose();
            q = c * qbar + cfg.alpha * (w * w.transpose()) + cfg.beta * q;
            for (int j = 0; j < p; ++j)
                sigma2[j] = vol_omega + cfg.garch_alpha * x(i - 1, j) * x(i - 1, j) +
                            cfg.garch_beta * sigma2[j];
        }
        Vector d = q.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        Matrix r = d.asDiagonal() * q * d.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Matrix> es(r);
        Vector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        for (int j = 0; j < p; ++j)
            u[j] = path.student_t_unit(nu[static_cast<std::size_t>(j)]);
        z.row(i) =
            (es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose() * u)
                .transpose();
        x.row(i) = z.row(i).cwiseProduct(sigma2.cwiseSqrt().transpose());
    }

    if (cfg.delta > 0.0)
        x = contaminate(x, cfg.delta, cfg.contaminant_nu,
                        Rng::substream(cfg.seed, "contaminate").raw());
    return x;
}

Matrix contaminate(const Matrix& x, double delta, int nu, std::uint64_t seed) {
    if (delta < 0.0 || delta > 1.0) throw InputError("contaminate: delta in [0,1]");
    if (nu < 3) throw InputError("contaminate: nu must be >= 3");
    const Eigen::Index t = x.rows(), p = x.cols();
    const long long cells = static_cast<long long>(t) * p;
    const long long m = static_cast<long long>(std::floor(delta * static_cast<double>(cells)));
    Matrix out = x;
    if (m == 0) return out;

    // Partial Fisher-Yates over the flattened index space: the first m slots
    // of the shuffle are the replaced cells.
    std::vector<long long> idx(static_cast<std::size_t>(cells));
    for (long long i = 0; i < cells; ++i) idx[static_cast<std::size_t>(i)] = i;
    Rng rng(seed);
    const double scale = std::sqrt(static_cast<double>(nu) / (nu - 2));
    for (long long i = 0; i < m; ++i) {
        int j = rng.uniform_int(static_cast<int>(i), static_cast<int>(cells - 1));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        long long flat = idx[static_cast<std::size_t>(i)];
        out(static_cast<Eigen::Index>(flat / p), static_cast<Eigen::Index>(flat % p)) =
            rng.student_t(nu) / scale;
    }
    return out;
}

StudyTable monte_carlo_study(const StudyConfig& cfg) {
    if (cfg.reps < 1) throw InputError("monte_carlo_study: reps must be >= 1");
    if (cfg.estimators.empty())
        throw InputError("monte_carlo_study: no estimators requested");

    StudyTable table;
    table.config = cfg;
    const std::size_t ne = cfg.estimators.size();
    std::uint64_t cell_index = 0;
    for (double delta : cfg.deltas)
        for (int p : cfg.ps)
            for (int t : cfg.ts) {
                StudyCell cell;
                cell.delta = delta;
                cell.p = p;
                cell.t = t;
                cell.alphas.assign(ne, std::vector<double>(
                                           static_cast<std::size_t>(cfg.reps),
                                           std::numeric_limits<double>::quiet_NaN()));
                cell.betas = cell.alphas;
                cell.failures.assign(ne, 0);

                for (int rep = 0; rep < cfg.reps; ++rep) {
                    SimConfig sim;
                    sim.p = p;
                    sim.t = t;
                    sim.alpha = cfg.alpha;
                    sim.beta = cfg.beta;
                    sim.delta = delta;
                    sim.seed = Rng::substream(cfg.seed, "cell", cell_index,
                                              static_cast<std::uint64_t>(rep))
                                   .raw();
                    Matrix panel = simulate_panel(sim);

                    // Volatility stage is estimator-independent; share it.
                    Matrix residuals(t, p);
                    bool garch_ok = true;
                    try {
                        for (int j = 0; j < p; ++j)
                            residuals.col(j) = fit_garch11(panel.col(j)).residuals;
                    } catch (const std::runtime_error&) {
                        garch_ok = false;
                    }
                    Matrix scores;
                    for (std::size_t e = 0; e < ne; ++e) {
                        if (!garch_ok) {
                            ++cell.failures[e];
                            continue;
                        }
                        try {
                            RankMethod method = cfg.estimators[e];
                            Matrix driver;
                            CorrMatrix raw;
                            if (method == RankMethod::pearson) {
                                driver = residuals;
                                raw = {sample_correlation(residuals), method};
                            } else {
                                if (scores.size() == 0)
                                    scores = score_panel(residuals).scores;
                                driver = scores;
                                raw = skeptic_matrix(residuals, method);
                            }
                            CorrMatrix qbar = nearest_correlation(raw);
                            PhiFit pf = estimate_phi(driver, qbar.values);
                            cell.alphas[e][static_cast<std::size_t>(rep)] = pf.phi.alpha;
                            cell.betas[e][static_cast<std::size_t>(rep)] = pf.phi.beta;
                        } catch (const std::runtime_error&) {
                            ++cell.failures[e];
                        }
                    }
                }

                for (std::size_t e = 0; e < ne; ++e) {
                    double sa = 0, sb = 0;
                    int n = 0;
                    for (int rep = 0; rep < cfg.reps; ++rep) {
                        double a = cell.alphas[e][static_cast<std::size_t>(rep)];
                        if (std::isnan(a)) continue;
                        sa += a;
                        sb += cell.betas[e][static_cast<std::size_t>(rep)];
                        ++n;
                    }
                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    if (n == 0) {
                        cell.mean_alpha.push_back(nan);
                        cell.mean_beta.push_back(nan);
                        cell.sd_alpha.push_back(nan);
                        cell.sd_beta.push_back(nan);
                        continue;
                    }
                    double ma = sa / n, mb = sb / n;
                    cell.mean_alpha.push_back(ma);
                    cell.mean_beta.push_back(mb);
                    if (n < 2) {
                        cell.sd_alpha.push_back(nan);
                        cell.sd_beta.push_back(nan);
                        continue;
                    }
                    double va = 0, vb = 0;
                    for (int rep = 0; rep < cfg.reps; ++rep) {
                        double a = cell.alphas[e][static_cast<std::size_t>(rep)];
                        if (std::isnan(a)) continue;
                        va += (a - ma) * (a - ma);
                        double b = cell.betas[e][static_cast<std::size_t>(rep)];
                        vb += (b - mb) * (b - mb);
                    }
                    cell.sd_alpha.push_back(std::sqrt(va / (n - 1)));
                    cell.sd_beta.push_back(std::sqrt(vb / (n - 1)));
                }
                table.cells.push_back(std::move(cell));
                ++cell_index;
            }
    return table;
}

}  // namespace dcs
