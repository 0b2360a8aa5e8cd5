// Python bindings for the core operations. Thin wrappers: matrices cross as
// numpy arrays via pybind11/eigen, test results and fits come back as dicts,
// and the model object is exposed read-only with its forecast/path methods.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcskeptic/dcs.hpp"
#include "dcskeptic/diagnostics.hpp"
#include "dcskeptic/portfolio.hpp"
#include "dcskeptic/ranks.hpp"
#include "dcskeptic/risk.hpp"
#include "dcskeptic/simulate.hpp"
#include "dcskeptic/stats.hpp"

namespace py = pybind11;
using namespace dcs;

namespace {

RankMethod parse_method(const std::string& name) {
    if (name == "tau") return RankMethod::tau;
    if (name == "rho") return RankMethod::rho;
    if (name == "pearson") return RankMethod::pearson;
    throw InputError("unknown method '" + name + "' (expected tau, rho or pearson)");
}

py::dict to_dict(const TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    if (!r.note.empty()) d["note"] = r.note;
    return d;
}

std::vector<std::uint8_t> to_hits(const std::vector<int>& v) {
    std::vector<std::uint8_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0 && v[i] != 1) throw InputError("violation series must be 0/1");
        out[i] = static_cast<std::uint8_t>(v[i]);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_dcskeptic, m) {
    m.doc() = "rank-driven dynamic correlation model: core operations";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    // rank statistics and scores
    m.def("kendall_tau", &kendall_tau, py::arg("x"), py::arg("y"));
    m.def("spearman_rho", &spearman_rho, py::arg("x"), py::arg("y"));
    m.def("ecdf_transform", &ecdf_transform, py::arg("x"));
    m.def("normal_scores", &normal_scores, py::arg("u"));
    m.def(
        "score_panel",
        [](const Matrix& resid) { return score_panel(resid).scores; },
        py::arg("residuals"), "column-wise ecdf -> inverse-normal scores");
    m.def("sample_correlation", &sample_correlation, py::arg("x"));
    m.def(
        "skeptic_matrix",
        [](const Matrix& panel, const std::string& method) {
            return skeptic_matrix(panel, parse_method(method)).values;
        },
        py::arg("panel"), py::arg("method"),
        "rank correlation mapped through the sine bridge (method 'tau' or 'rho')");
    m.def(
        "nearest_correlation",
        [](const Matrix& r, double tol, int max_sweeps) {
            return nearest_correlation(CorrMatrix{r, RankMethod::pearson}, tol, max_sweeps)
                .values;
        },
        py::arg("r"), py::arg("tol") = 1e-10, py::arg("max_sweeps") = 2000);

    // volatility stage
    m.def(
        "fit_garch11",
        [](const Vector& x, bool leverage) {
            GarchFit f = fit_garch11(x, leverage);
            py::dict d;
            d["omega"] = f.params.omega;
            d["alpha1"] = f.params.alpha1;
            d["beta1"] = f.params.beta1;
            d["gamma1"] = f.params.gamma1;
            d["sigma"] = f.sigma;
            d["residuals"] = f.residuals;
            d["loglik"] = f.loglik;
            return d;
        },
        py::arg("x"), py::arg("leverage") = false);

    // the correlation model
    py::class_<DcsModel>(m, "DcsModel")
        .def_property_readonly("alpha", [](const DcsModel& s) { return s.phi.alpha; })
        .def_property_readonly("beta", [](const DcsModel& s) { return s.phi.beta; })
        .def_property_readonly(
            "method", [](const DcsModel& s) { return std::string(rank_method_name(s.method)); })
        .def_property_readonly("qbar", [](const DcsModel& s) { return s.qbar.values; })
        .def_readonly("residuals", &DcsModel::residuals)
        .def_readonly("driver", &DcsModel::driver)
        .def_readonly("leverage", &DcsModel::leverage)
        .def_readonly("phi_objective", &DcsModel::phi_objective)
        .def("correlation_series", [](const DcsModel& s) { return correlation_series(s); })
        .def("covariance_series", [](const DcsModel& s) { return covariance_series(s); })
        .def("forecast_covariance", [](const DcsModel& s) { return forecast_covariance(s); })
        .def("loglik_aic_bic", [](const DcsModel& s) {
            FitStats st = model_loglik_aic_bic(s);
            py::dict d;
            d["loglik"] = st.loglik;
            d["aic"] = st.aic;
            d["bic"] = st.bic;
            d["n_params"] = st.n_params;
            return d;
        });
    m.def(
        "fit_dcs",
        [](const Matrix& returns, const std::string& method, bool leverage) {
            return fit_dcs(returns, parse_method(method), leverage);
        },
        py::arg("returns"), py::arg("method") = "rho", py::arg("leverage") = false);
    m.def(
        "composite_loglik",
        [](const Matrix& driver, const Matrix& qbar, double alpha, double beta) {
            return composite_loglik(driver, qbar, DcsParams{alpha, beta});
        },
        py::arg("driver"), py::arg("qbar"), py::arg("alpha"), py::arg("beta"));

    // portfolio construction
    m.def("gmv_weights", &gmv_weights, py::arg("h"));
    m.def("sparse_precision", &sparse_precision, py::arg("r"), py::arg("lam"));
    m.def(
        "glasso_kkt_residual",
        [](const Matrix& r, const Matrix& theta, double lam) {
            return glasso_kkt_residual(r, theta, lam);
        },
        py::arg("r"), py::arg("theta"), py::arg("lam"));
    m.def(
        "stars_select",
        [](const Matrix& panel, const std::vector<double>& grid, const std::string& method,
           double cap, int n_subsamples, int subsample_size, std::uint64_t seed) {
            StarsResult r = stars_select(panel, grid, parse_method(method), cap,
                                         n_subsamples, subsample_size, seed);
            py::dict d;
            d["lambda"] = r.lambda;
            d["capped_warning"] = r.capped_warning;
            d["instability"] = r.instability;
            return d;
        },
        py::arg("panel"), py::arg("grid"), py::arg("method") = "pearson",
        py::arg("cap") = 0.05, py::arg("n_subsamples") = 20, py::arg("subsample_size") = 0,
        py::arg("seed") = 1);

    // tail risk
    m.def(
        "var_es_normal",
        [](double sigma, double alpha) {
            VarEs v = var_es_normal(sigma, alpha);
            return py::make_tuple(v.var, v.es);
        },
        py::arg("sigma"), py::arg("alpha"));
    m.def(
        "kupiec_uc",
        [](const std::vector<int>& viol, double alpha) {
            return to_dict(kupiec_uc(to_hits(viol), alpha));
        },
        py::arg("violations"), py::arg("alpha"));
    m.def(
        "christoffersen_cc",
        [](const std::vector<int>& viol, double alpha) {
            return to_dict(christoffersen_cc(to_hits(viol), alpha));
        },
        py::arg("violations"), py::arg("alpha"));
    m.def(
        "engle_dq",
        [](const std::vector<int>& viol, const Vector& var, double alpha, int lags) {
            return to_dict(engle_dq(to_hits(viol), var, alpha, lags));
        },
        py::arg("violations"), py::arg("var"), py::arg("alpha"), py::arg("lags") = 4);

    // diagnostics
    m.def("jarque_bera", [](const Vector& x) { return to_dict(jarque_bera(x)); }, py::arg("x"));
    m.def(
        "portmanteau",
        [](const Matrix& resid, int h, int k) { return to_dict(portmanteau(resid, h, k)); },
        py::arg("residuals"), py::arg("h"), py::arg("k") = 0);
    m.def(
        "ks_normal",
        [](const Vector& x, double mu, double sigma) {
            Reference ref;
            ref.mu = mu;
            ref.sigma = sigma;
            return to_dict(ks_test(x, ref));
        },
        py::arg("x"), py::arg("mu") = 0.0, py::arg("sigma") = 1.0);
    m.def(
        "two_sample_t",
        [](const Vector& a, const Vector& b) { return to_dict(two_sample_t(a, b)); },
        py::arg("r1"), py::arg("r2"));
    m.def(
        "variance_f",
        [](const Vector& a, const Vector& b) { return to_dict(variance_f(a, b)); },
        py::arg("r1"), py::arg("r2"));
    m.def(
        "sharpe_diff_bootstrap",
        [](const Vector& a, const Vector& b, int block_len, int n_boot, std::uint64_t seed) {
            return to_dict(sharpe_diff_bootstrap(a, b, block_len, n_boot, seed));
        },
        py::arg("r1"), py::arg("r2"), py::arg("block_len") = 0, py::arg("n_boot") = 1000,
        py::arg("seed") = 1);

    // synthetic data
    m.def(
        "simulate_panel",
        [](int p, int t, double alpha, double beta, double delta, std::uint64_t seed,
           double garch_alpha, double garch_beta) {
            SimConfig cfg;
            cfg.p = p;
            cfg.t = t;
            cfg.alpha = alpha;
            cfg.beta = beta;
            cfg.delta = delta;
            cfg.seed = seed;
            cfg.garch_alpha = garch_alpha;
            cfg.garch_beta = garch_beta;
            return simulate_panel(cfg);
        },
        py::arg("p"), py::arg("t"), py::arg("alpha") = 0.02, py::arg("beta") = 0.97,
        py::arg("delta") = 0.0, py::arg("seed") = 1, py::arg("garch_alpha") = 0.05,
        py::arg("garch_beta") = 0.90);
    m.def("contaminate", &contaminate, py::arg("x"), py::arg("delta"), py::arg("nu"),
          py::arg("seed"));
    m.def("random_correlation", &random_correlation, py::arg("p"), py::arg("seed"),
          py::arg("cond_cap") = 100.0, py::arg("df") = 0);

    // rolling backtest
    m.def(
        "rolling_backtest",
        [](const Matrix& returns, int window, int holding, const std::string& estimator,
           bool leverage, std::uint64_t seed) {
            BacktestConfig cfg;
            cfg.window = window;
            cfg.holding = holding;
            if (estimator == "dcc") cfg.estimator = Estimator::dcc;
            else if (estimator == "dcs-tau") cfg.estimator = Estimator::dcs_tau;
            else if (estimator == "dcs-rho") cfg.estimator = Estimator::dcs_rho;
            else if (estimator == "ew") cfg.estimator = Estimator::equal_weight;
            else throw InputError("unknown estimator '" + estimator + "'");
            cfg.leverage = leverage;
            cfg.seed = seed;
            BacktestLedger ledger = rolling_backtest(returns, cfg);
            PerfReport perf = performance_metrics(ledger);
            py::dict d;
            d["daily_returns"] = ledger.daily_returns;
            d["target_weights"] = ledger.target_weights;
            d["rebalance_index"] = ledger.rebalance_index;
            d["failed_rebalances"] = ledger.failed_rebalances;
            d["av"] = perf.av;
            d["sd"] = perf.sd;
            d["sr"] = perf.sr;
            d["turnover"] = perf.turnover;
            return d;
        },
        py::arg("returns"), py::arg("window") = 500, py::arg("holding") = 21,
        py::arg("estimator") = "dcs-rho", py::arg("leverage") = false, py::arg("seed") = 1);

    // scalar distribution helpers
    m.def("norm_cdf", &norm_cdf, py::arg("x"));
    m.def("norm_quantile", &norm_quantile, py::arg("u"));
    m.def("chi2_sf", &chi2_sf, py::arg("x"), py::arg("df"));
    m.def("kolmogorov_sf", &kolmogorov_sf, py::arg("x"));
}
