#include "dcskeptic/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

#include "dcskeptic/rng.hpp"

namespace dcs {

namespace {

std::optional<Vector> try_gmv(const Matrix& h) {
    Eigen::LDLT<Matrix> ldlt(h);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    Vector d = ldlt.vectorD();
    if (d.minCoeff() <= 1e-12 * std::max(1e-300, d.maxCoeff())) return std::nullopt;
    Vector w = ldlt.solve(Vector::Ones(h.rows()));
    double s = w.sum();
    if (!std::isfinite(s) || std::fabs(s) < 1e-300) return std::nullopt;
    w /= s;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (!std::isfinite(w[i])) return std::nullopt;
    return w;
}

double soft_threshold(double z, double lam) {
    if (z > lam) return z - lam;
    if (z < -lam) return z + lam;
    return 0.0;
}

}  // namespace

const char* estimator_name(Estimator e) {
    switch (e) {
        case Estimator::dcc: return "dcc";
        case Estimator::dcs_tau: return "dcs-tau";
        case Estimator::dcs_rho: return "dcs-rho";
        default: return "ew";
    }
}

Vector gmv_weights(const Matrix& h) {
    const Eigen::Index p = h.rows();
    if (p == 0 || h.cols() != p) throw InputError("gmv_weights: matrix must be square");
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            if (!std::isfinite(h(i, j)))
                throw InputError("gmv_weights: non-finite covariance entry");

    if (auto w = try_gmv(h)) return *w;

    // Repair route: fix the correlation part, reload the volatilities.
    Vector diag = h.diagonal();
    if (diag.minCoeff() <= 0.0)
        throw NumericError("gmv_weights: nonpositive variance on the diagonal");
    Vector d = diag.cwiseSqrt();
    Vector dinv = d.cwiseInverse();
    Matrix c = dinv.asDiagonal() * h * dinv.asDiagonal();
    c = 0.5 * (c + c.transpose());
    c.diagonal().setOnes();
    CorrMatrix repaired = nearest_correlation({c, RankMethod::pearson});
    Matrix h2 = d.asDiagonal() * repaired.values * d.asDiagonal();
    if (auto w = try_gmv(h2)) return *w;
    throw NumericError("gmv_weights: covariance singular even after repair");
}

double glasso_kkt_residual(const Matrix& r, const Matrix& theta, double lambda) {
    Eigen::LDLT<Matrix> ldlt(theta);
    if (ldlt.info() != Eigen::Success)
        throw NumericError("glasso_kkt_residual: theta not factorizable");
    Matrix w = ldlt.solve(Matrix::Identity(theta.rows(), theta.cols()));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            double g = r(i, j) - w(i, j);
            double res;
            if (i == j) {
                res = std::fabs(g);
            } else if (theta(i, j) != 0.0) {
                res = std::fabs(g + lambda * (theta(i, j) > 0 ? 1.0 : -1.0));
            } else {
                res = std::max(0.0, std::fabs(g) - lambda);
            }
            worst = std::max(worst, res);
        }
    return worst;
}

Matrix sparse_precision(const Matrix& r, double lambda) {
    if (lambda < 0.0) throw InputError("sparse_precision: lambda must be >= 0");
    validate_correlation(r);
    const Eigen::Index p = r.rows();

    if (p == 1) return Matrix::Constant(1, 1, 1.0);

    if (lambda == 0.0) {
        Eigen::LDLT<Matrix> ldlt(r);
        if (ldlt.info() != Eigen::Success ||
            ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff())
            throw NumericError("sparse_precision: matrix singular at lambda=0");
        Matrix theta = ldlt.solve(Matrix::Identity(p, p));
        return 0.5 * (theta + theta.transpose());
    }

    // Block coordinate descent (graphical lasso) with unpenalized diagonal:
    // W tracks the working inverse, one lasso subproblem per column.
    Matrix w = r;
    Matrix betas = Matrix::Zero(p, p);  // column j holds beta for column j
    const double kkt_target = 0.5e-6;
    const int max_sweeps = 400;
    Matrix theta(p, p);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (Eigen::Index j = 0; j < p; ++j) {
            // Inner lasso: minimize 1/2 b' W11 b - s12' b + lambda |b|_1.
            for (int it = 0; it < 1000; ++it) {
                double max_delta = 0.0;
                for (Eigen::Index k = 0; k < p; ++k) {
                    if (k == j) continue;
                    double acc = r(k, j);
                    for (Eigen::Index l = 0; l < p; ++l) {
                        if (l == j || l == k) continue;
                        acc -= w(k, l) * betas(l, j);
                    }
                    double bnew = soft_threshold(acc, lambda) / w(k, k);
                    max_delta = std::max(max_delta, std::fabs(bnew - betas(k, j)));
                    betas(k, j) = bnew;
                }
                if (max_delta < 1e-11) break;
            }
            for (Eigen::Index k = 0; k < p; ++k) {
                if (k == j) continue;
                double acc = 0.0;
                for (Eigen::Index l = 0; l < p; ++l) {
                    if (l == j) continue;
                    acc += w(k, l) * betas(l, j);
                }
                w(k, j) = acc;
                w(j, k) = acc;
            }
        }

        // Recover theta from (W, betas) and check optimality directly.
        for (Eigen::Index j = 0; j < p; ++j) {
            double dot = 0.0;
            for (Eigen::Index k = 0; k < p; ++k) {
                if (k == j) continue;
                dot += w(k, j) * betas(k, j);
            }
            double tjj = 1.0 / std::max(1e-300, w(j, j) - dot);
            theta(j, j) = tjj;
            for (Eigen::Index k = 0; k < p; ++k) {
                if (k == j) continue;
                theta(k, j) = -betas(k, j) * tjj;
            }
        }
        theta = 0.5 * (theta + Matrix(theta.transpose()));
        if (glasso_kkt_residual(r, theta, lambda) < kkt_target) return theta;
    }
    throw ConvergenceError("sparse_precision: KKT residual did not converge");
}

std::vector<double> default_lambda_grid(const Matrix& r, int n) {
    double lmax = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) lmax = std::max(lmax, std::fabs(r(i, j)));
    if (lmax <= 0.0) lmax = 1.0;
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        grid[static_cast<std::size_t>(i)] =
            lmax * std::pow(100.0, -static_cast<double>(i) / (n - 1));
    return grid;
}

StarsResult stars_select(const Matrix& panel, const std::vector<double>& grid,
                         RankMethod method, double cap, int n_subsamples,
                         int subsample_size, std::uint64_t seed) {
    const Eigen::Index t = panel.rows(), p = panel.cols();
    if (grid.empty()) throw InputError("stars_select: empty lambda grid");
    if (p < 2) throw InputError("stars_select: need at least two columns");
    if (n_subsamples < 2) throw InputError("stars_select: need at least two subsamples");
    for (double l : grid)
        if (!(l > 0.0)) throw InputError("stars_select: lambdas must be positive");

    std::vector<double> lambdas = grid;
    std::sort(lambdas.begin(), lambdas.end(), std::greater<double>());

    int b = subsample_size > 0
                ? subsample_size
                : static_cast<int>(std::floor(10.0 * std::sqrt(static_cast<double>(t))));
    b = std::min<int>(b, static_cast<int>(t));
    if (b < 10) throw InputError("stars_select: subsample size too small");

    const std::size_t n_lambda = lambdas.size();
    const Eigen::Index n_edges = p * (p - 1) / 2;
    Matrix counts = Matrix::Zero(static_cast<Eigen::Index>(n_lambda), n_edges);

    std::vector<int> rows(static_cast<std::size_t>(t));
    std::iota(rows.begin(), rows.end(), 0);
    for (int s = 0; s < n_subsamples; ++s) {
        Rng rng = Rng::substream(seed, "stars", static_cast<std::uint64_t>(s));
        for (int i = 0; i < b; ++i) {
            int j = rng.uniform_int(i, static_cast<int>(t) - 1);
            std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
        }
        Matrix sub(b, p);
        for (int i = 0; i < b; ++i) sub.row(i) = panel.row(rows[static_cast<std::size_t>(i)]);

        CorrMatrix c = method == RankMethod::pearson
                           ? CorrMatrix{sample_correlation(sub), method}
                           : skeptic_matrix(sub, method);
        c = nearest_correlation(c);
        for (std::size_t li = 0; li < n_lambda; ++li) {
            Matrix theta;
            try {
                theta = sparse_precision(c.values, lambdas[li]);
            } catch (const std::runtime_error&) {
                continue;  // treat an unsolvable subsample as an empty graph
            }
            Eigen::Index e = 0;
            for (Eigen::Index i = 0; i < p; ++i)
                for (Eigen::Index j = 0; j < i; ++j, ++e)
                    if (std::fabs(theta(i, j)) > 1e-8)
                        counts(static_cast<Eigen::Index>(li), e) += 1.0;
        }
    }

    StarsResult out;
    out.instability.resize(n_lambda);
    double running = 0.0;
    std::size_t chosen = n_lambda;  // sentinel: none feasible
    for (std::size_t li = 0; li < n_lambda; ++li) {
        double inst = 0.0;
        for (Eigen::Index e = 0; e < n_edges; ++e) {
            double xi = counts(static_cast<Eigen::Index>(li), e) / n_subsamples;
            inst += 2.0 * xi * (1.0 - xi);
        }
        inst /= static_cast<double>(n_edges);
        running = std::max(running, inst);
        out.instability[li] = running;
        if (chosen == n_lambda && running <= cap) chosen = li;
    }
    if (chosen == n_lambda) {
        out.lambda = lambdas.front();
        out.capped_warning = true;
    } else {
        out.lambda = lambdas[chosen];
    }
    return out;
}

namespace {

// One-step GMV target for a trailing window, dense or sparse route.
Vector window_target(const Matrix& window, const BacktestConfig& cfg,
                     std::uint64_t rebalance_ordinal) {
    const Eigen::Index p = window.cols();
    if (cfg.estimator == Estimator::equal_weight)
        return Vector::Constant(p, 1.0 / static_cast<double>(p));

    RankMethod method = RankMethod::pearson;
    if (cfg.estimator == Estimator::dcs_tau) method = RankMethod::tau;
    if (cfg.estimator == Estimator::dcs_rho) method = RankMethod::rho;

    if (cfg.sparsity.kind == SparsityConfig::Kind::none) {
        DcsModel m = fit_dcs(window, method, cfg.leverage);
        return gmv_weights(forecast_covariance(m));
    }

    // Sparse route: static rank (or Pearson) correlation for the window,
    // sparse inverse, volatility reload on the diagonal.
    std::vector<GarchFit> fits;
    Matrix residuals(window.rows(), p);
    for (Eigen::Index j = 0; j < p; ++j) {
        fits.push_back(fit_garch11(window.col(j), cfg.leverage));
        residuals.col(j) = fits.back().residuals;
    }
    CorrMatrix c = method == RankMethod::pearson
                       ? CorrMatrix{sample_correlation(residuals), method}
                       : skeptic_matrix(residuals, method);
    c = nearest_correlation(c);

    double lambda = cfg.sparsity.lambda;
    if (cfg.sparsity.kind == SparsityConfig::Kind::stars) {
        std::vector<double> grid = cfg.sparsity.grid.empty()
                                       ? default_lambda_grid(c.values, 10)
                                       : cfg.sparsity.grid;
        StarsResult sel = stars_select(
            residuals, grid, method, cfg.sparsity.cap, 20, 0,
            Rng::substream(cfg.seed, "stars_rebalance", rebalance_ordinal).raw());
        lambda = sel.lambda;
    }
    Matrix theta = sparse_precision(c.values, lambda);

    Vector dinv(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const GarchFit& g = fits[static_cast<std::size_t>(j)];
        double s2 = forecast_variance(window.col(j), g.sigma2, g.params);
        if (!(s2 > 0.0)) throw NumericError("window_target: nonpositive forecast variance");
        dinv[j] = 1.0 / std::sqrt(s2);
    }
    Matrix hinv = dinv.asDiagonal() * theta * dinv.asDiagonal();
    Vector w = hinv * Vector::Ones(p);
    double s = w.sum();
    if (!std::isfinite(s) || std::fabs(s) < 1e-300)
        throw NumericError("window_target: degenerate sparse precision weights");
    return w / s;
}

}  // namespace

BacktestLedger rolling_backtest(const Matrix& returns, const BacktestConfig& cfg) {
    const Eigen::Index t = returns.rows(), p = returns.cols();
    if (cfg.window < 200) throw InputError("rolling_backtest: window must be >= 200");
    if (cfg.holding < 1) throw InputError("rolling_backtest: holding must be >= 1");
    if (p < 2) throw InputError("rolling_backtest: need at least two assets");
    if (t <= cfg.window)
        throw InputError("rolling_backtest: panel must extend past the first window");

    BacktestLedger ledger;
    ledger.window = cfg.window;
    ledger.holding = cfg.holding;
    ledger.estimator = cfg.estimator;

    const Eigen::Index n_days = t - cfg.window;
    std::vector<Vector> targets, prerebs;
    std::vector<int> reb_index;

    ledger.day_index.reserve(static_cast<std::size_t>(n_days));
    ledger.daily_returns.resize(n_days);
    ledger.daily_weights.resize(n_days, p);

    Vector w;  // current drifted holdings
    bool have_holdings = false;
    std::uint64_t reb_ordinal = 0;
    for (Eigen::Index day = cfg.window; day < t; ++day) {
        if ((day - cfg.window) % cfg.holding == 0) {
            Vector target;
            try {
                target = window_target(returns.middleRows(day - cfg.window, cfg.window),
                                       cfg, reb_ordinal);
            } catch (const std::runtime_error&) {
                ledger.failed_rebalances.push_back(static_cast<int>(day));
                target = have_holdings
                             ? w
                             : Vector::Constant(p, 1.0 / static_cast<double>(p));
            }
            prerebs.push_back(have_holdings ? w : target);
            targets.push_back(target);
            reb_index.push_back(static_cast<int>(day));
            w = target;
            have_holdings = true;
            ++reb_ordinal;
        }

        const Eigen::Index i = day - cfg.window;
        double rp = w.dot(returns.row(day).transpose());
        ledger.day_index.push_back(static_cast<int>(day));
        ledger.daily_returns[i] = rp;
        ledger.daily_weights.row(i) = w.transpose();
        if (std::fabs(1.0 + rp) < 1e-12)
            throw NumericError("rolling_backtest: portfolio return hit -100%");
        for (Eigen::Index j = 0; j < p; ++j)
            w[j] = w[j] * (1.0 + returns(day, j)) / (1.0 + rp);
    }

    const Eigen::Index n_reb = static_cast<Eigen::Index>(targets.size());
    ledger.target_weights.resize(n_reb, p);
    ledger.prereb_weights.resize(n_reb, p);
    for (Eigen::Index i = 0; i < n_reb; ++i) {
        ledger.target_weights.row(i) = targets[static_cast<std::size_t>(i)].transpose();
        ledger.prereb_weights.row(i) = prerebs[static_cast<std::size_t>(i)].transpose();
    }
    ledger.rebalance_index = std::move(reb_index);
    return ledger;
}

PerfReport performance_metrics(const BacktestLedger& ledger, bool drifted) {
    const Eigen::Index n = ledger.daily_returns.size();
    const Eigen::Index n_reb = ledger.target_weights.rows();
    if (n_reb < 2)
        throw InputError("performance_metrics: need at least two rebalances");
    if (n < 2) throw InputError("performance_metrics: need at least two daily returns");

    double mean = ledger.daily_returns.mean();
    double sd = std::sqrt((ledger.daily_returns.array() - mean).square().sum() /
                          static_cast<double>(n - 1));
    if (!(sd > 0.0))
        throw InputError("performance_metrics: zero return variance, Sharpe undefined");

    PerfReport rep;
    rep.av = 252.0 * mean * 100.0;
    rep.sd = std::sqrt(252.0) * sd * 100.0;
    rep.sr = rep.av / rep.sd;

    double to = 0.0;
    for (Eigen::Index h = 1; h < n_reb; ++h) {
        Vector base = drifted ? ledger.prereb_weights.row(h).transpose()
                              : ledger.target_weights.row(h - 1).transpose();
        to += (ledger.target_weights.row(h).transpose() - base).cwiseAbs().sum();
    }
    rep.turnover = to / static_cast<double>(n_reb - 1);
    return rep;
}

}  // namespace dcs
