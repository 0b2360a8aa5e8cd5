// Batch front-end: fit / simulate / backtest / risk / report subcommands.
// All outputs are CSV or JSON, deterministic for a fixed seed: sorted
// `# key=value` config headers on CSVs, insertion-ordered JSON, %.10g
// floats, no timestamps.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcskeptic/dcs.hpp"
#include "dcskeptic/diagnostics.hpp"
#include "dcskeptic/ingest.hpp"
#include "dcskeptic/portfolio.hpp"
#include "dcskeptic/risk.hpp"
#include "dcskeptic/rng.hpp"
#include "dcskeptic/simulate.hpp"
#include "dcskeptic/stats.hpp"

using json = nlohmann::ordered_json;
using namespace dcs;

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

using ConfigMap = std::map<std::string, std::string>;

std::string trim_ws(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat `key=value` config file applied to one subcommand's options after
// parsing; options already given on the command line keep their values.
void apply_config_file(CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim_ws(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw InputError("config file line " + std::to_string(lineno) +
                             " is not key=value: '" + t + "'");
        std::string key = trim_ws(t.substr(0, eq));
        std::string value = trim_ws(t.substr(eq + 1));
        if (key.empty())
            throw InputError("config file line " + std::to_string(lineno) +
                             " has an empty key");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw InputError("unknown config key '" + key + "' for subcommand '" +
                             sub->get_name() + "'");
        if (opt->count() > 0) continue;  // command-line flags override
        opt->add_result(value.empty() ? "true" : value);
        opt->run_callback();
    }
}

std::string csv_header(const std::string& command, const ConfigMap& cfg) {
    std::string out = "# command=" + command + "\n";
    for (const auto& [k, v] : cfg) out += "# " + k + "=" + v + "\n";
    return out;
}

json config_json(const ConfigMap& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg) j[k] = v;
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << content;
}

std::filesystem::path ensure_outdir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

RankMethod method_from_tag(const std::string& tag) {
    if (tag == "dcc") return RankMethod::pearson;
    if (tag == "dcs-tau") return RankMethod::tau;
    if (tag == "dcs-rho") return RankMethod::rho;
    throw InputError("unknown method '" + tag + "' (expected dcc, dcs-tau or dcs-rho)");
}

Estimator estimator_from_tag(const std::string& tag) {
    if (tag == "dcc") return Estimator::dcc;
    if (tag == "dcs-tau") return Estimator::dcs_tau;
    if (tag == "dcs-rho") return Estimator::dcs_rho;
    if (tag == "ew") return Estimator::equal_weight;
    throw InputError("unknown method '" + tag + "' (expected dcc, dcs-tau, dcs-rho or ew)");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// Shared ingestion options.
struct InputOpts {
    std::string input;
    std::string kind = "prices";     // prices | returns
    std::string policy = "drop";     // drop | ffill
    int max_k = 1;
    bool allow_missing = false;
};

void add_input_opts(CLI::App* cmd, InputOpts& io) {
    cmd->add_option("--input", io.input, "input CSV (wide: date,TICK,...; long: date,ticker,value)")
        ->required();
    cmd->add_option("--input-kind", io.kind, "prices | returns (default prices)")
        ->check(CLI::IsMember({"prices", "returns"}));
    cmd->add_option("--policy", io.policy, "missing-data policy: drop | ffill")
        ->check(CLI::IsMember({"drop", "ffill"}));
    cmd->add_option("--max-k", io.max_k, "ffill: longest gap carried forward");
    cmd->add_flag("--allow-missing", io.allow_missing,
                  "load holes as NaN for the cleaning policy instead of erroring");
}

ReturnPanel load_input(const InputOpts& io) {
    ReturnPanel raw = load_prices(io.input, io.allow_missing);
    CleanPolicy policy;
    policy.kind = io.policy == "ffill" ? CleanPolicy::Kind::forward_fill
                                       : CleanPolicy::Kind::drop_incomplete_rows;
    policy.max_k = io.max_k;
    return io.kind == "prices" ? to_returns(raw, policy) : clean_returns(raw, policy);
}

void describe_input(const InputOpts& io, ConfigMap& cfg) {
    cfg["input"] = io.input;
    cfg["input_kind"] = io.kind;
    cfg["policy"] = io.policy;
    cfg["max_k"] = std::to_string(io.max_k);
    cfg["allow_missing"] = io.allow_missing ? "true" : "false";
}

// Scores decorrelated by the fitted path; iid N(0, I) under a correct fit.
Matrix decorrelated_driver(const DcsModel& model) {
    std::vector<Matrix> rs = correlation_series(model);
    const Eigen::Index t = model.driver.rows(), p = model.driver.cols();
    Matrix e(t, p);
    for (Eigen::Index i = 0; i < t; ++i) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rs[static_cast<std::size_t>(i)]);
        Vector inv_sqrt = es.eigenvalues().cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
        e.row(i) = (es.eigenvectors() * inv_sqrt.asDiagonal() *
                    es.eigenvectors().transpose() * model.driver.row(i).transpose())
                       .transpose();
    }
    return e;
}

json test_json(const TestResult& r) {
    json j;
    j["statistic"] = fmt(r.statistic);
    j["p_value"] = fmt(r.p_value);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

// ---------------------------------------------------------------- fit ----

struct FitOpts {
    InputOpts io;
    std::string method = "dcs-rho";
    bool leverage = false;
    bool rt_csv = false;
    int lags = 10;
    std::string out = ".";
};

void cmd_fit(const FitOpts& o) {
    ReturnPanel panel = load_input(o.io);
    DcsModel model = fit_dcs(panel.values, method_from_tag(o.method), o.leverage);
    FitStats stats = model_loglik_aic_bic(model);

    const Eigen::Index p = model.driver.cols();
    double jb_sum = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
        jb_sum += jarque_bera(model.driver.col(j)).statistic;
    double jb_p = chi2_sf(jb_sum, 2.0 * static_cast<double>(p));
    TestResult pm = portmanteau(decorrelated_driver(model), o.lags, 2);

    ConfigMap cfg;
    describe_input(o.io, cfg);
    cfg["method"] = o.method;
    cfg["leverage"] = o.leverage ? "true" : "false";
    cfg["lags"] = std::to_string(o.lags);

    json j;
    j["command"] = "fit";
    j["config"] = config_json(cfg);
    j["method"] = o.method;
    j["alpha"] = fmt(model.phi.alpha);
    j["beta"] = fmt(model.phi.beta);
    j["loglik"] = fmt(stats.loglik);
    j["aic"] = fmt(stats.aic);
    j["bic"] = fmt(stats.bic);
    j["jb"] = {{"statistic", fmt(jb_sum)}, {"p_value", fmt(jb_p)}};
    j["portmanteau"] = test_json(pm);

    auto dir = ensure_outdir(o.out);
    write_file(dir / "fit_summary.json", j.dump(2) + "\n");

    if (o.rt_csv) {
        std::vector<Matrix> rs = correlation_series(model);
        std::string csv = csv_header("fit", cfg);
        csv += "date,ticker_i,ticker_j,correlation\n";
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (Eigen::Index a = 0; a < p; ++a)
                for (Eigen::Index b = a + 1; b < p; ++b)
                    csv += panel.dates[i] + "," + panel.tickers[static_cast<std::size_t>(a)] +
                           "," + panel.tickers[static_cast<std::size_t>(b)] + "," +
                           fmt(rs[i](a, b)) + "\n";
        write_file(dir / "rt_path.csv", csv);
    }
}

// ----------------------------------------------------------- simulate ----

struct SimulateOpts {
    std::string grid;
    int reps = 20;
    std::string estimators = "dcc,dcs-rho";
    double dgp_alpha = 0.02;
    double dgp_beta = 0.97;
    std::uint64_t seed = 1;
    std::string out = ".";
};

std::vector<double> parse_numbers(const std::string& csv, const std::string& what) {
    std::vector<double> out;
    for (const std::string& tok : split_list(csv)) {
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw InputError("bad " + what + " value '" + tok + "' in --grid");
        }
    }
    if (out.empty()) throw InputError("empty " + what + " list in --grid");
    return out;
}

void apply_grid(const std::string& grid, StudyConfig& cfg) {
    // --grid "p=10,50 T=1000,2000 delta=0.01,0.10"
    std::stringstream ss(grid);
    std::string tok;
    while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw InputError("bad --grid token '" + tok + "' (expected key=values)");
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "p") {
            cfg.ps.clear();
            for (double v : parse_numbers(val, "p")) cfg.ps.push_back(static_cast<int>(v));
        } else if (key == "T" || key == "t") {
            cfg.ts.clear();
            for (double v : parse_numbers(val, "T")) cfg.ts.push_back(static_cast<int>(v));
        } else if (key == "delta") {
            cfg.deltas = parse_numbers(val, "delta");
        } else {
            throw InputError("unknown --grid key '" + key + "' (expected p, T or delta)");
        }
    }
}

void cmd_simulate(const SimulateOpts& o) {
    StudyConfig cfg;
    cfg.reps = o.reps;
    cfg.alpha = o.dgp_alpha;
    cfg.beta = o.dgp_beta;
    cfg.seed = o.seed;
    if (!o.grid.empty()) apply_grid(o.grid, cfg);

    std::vector<std::string> tags = split_list(o.estimators);
    if (tags.empty()) throw InputError("--estimators is empty");
    cfg.estimators.clear();
    for (const std::string& tag : tags) cfg.estimators.push_back(method_from_tag(tag));

    StudyTable table = monte_carlo_study(cfg);

    ConfigMap meta;
    meta["reps"] = std::to_string(o.reps);
    meta["estimators"] = o.estimators;
    meta["dgp_alpha"] = fmt(o.dgp_alpha);
    meta["dgp_beta"] = fmt(o.dgp_beta);
    meta["seed"] = std::to_string(o.seed);
    meta["grid"] = o.grid.empty() ? "default" : o.grid;

    std::string csv = csv_header("simulate", meta);
    csv += "delta,p,T,stat";
    for (const std::string& tag : tags) csv += "," + tag + "_alpha," + tag + "_beta";
    csv += "\n";
    std::string failures;
    for (const StudyCell& cell : table.cells) {
        std::string prefix =
            fmt(cell.delta) + "," + std::to_string(cell.p) + "," + std::to_string(cell.t);
        csv += prefix + ",mean";
        for (std::size_t e = 0; e < tags.size(); ++e)
            csv += "," + fmt(cell.mean_alpha[e]) + "," + fmt(cell.mean_beta[e]);
        csv += "\n" + prefix + ",sd";
        for (std::size_t e = 0; e < tags.size(); ++e)
            csv += "," + fmt(cell.sd_alpha[e]) + "," + fmt(cell.sd_beta[e]);
        csv += "\n";
        for (std::size_t e = 0; e < tags.size(); ++e)
            if (cell.failures[e] > 0)
                failures += prefix + "," + tags[e] + "," +
                            std::to_string(cell.failures[e]) + "\n";
    }
    auto dir = ensure_outdir(o.out);
    write_file(dir / "study.csv", csv);
    if (!failures.empty())
        write_file(dir / "study_failures.csv",
                   csv_header("simulate", meta) + "delta,p,T,estimator,failures\n" + failures);
}

// ----------------------------------------------------------- backtest ----

struct BacktestOpts {
    InputOpts io;
    std::string methods = "dcc,dcs-tau,dcs-rho,ew";
    int window = 500;
    int holding = 21;
    double alpha = 0.05;
    std::string sparsity = "none";  // none | lambda=<v> | stars
    bool leverage = false;
    int dq_lags = 4;
    std::uint64_t seed = 1;
    std::string out = ".";
};

SparsityConfig parse_sparsity(const std::string& s) {
    SparsityConfig cfg;
    if (s == "none") return cfg;
    if (s == "stars") {
        cfg.kind = SparsityConfig::Kind::stars;
        return cfg;
    }
    if (s.rfind("lambda=", 0) == 0) {
        cfg.kind = SparsityConfig::Kind::fixed;
        std::string v = s.substr(7);
        try {
            std::size_t used = 0;
            cfg.lambda = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
            throw InputError("bad --sparsity lambda value '" + v + "'");
        }
        if (cfg.lambda < 0) throw InputError("--sparsity lambda must be >= 0");
        return cfg;
    }
    throw InputError("unknown --sparsity '" + s + "' (expected none, lambda=<v> or stars)");
}

struct RiskRow {
    double fail_rate;
    TestResult uc, cc, dq;
};

RiskRow risk_tests(const std::vector<std::uint8_t>& violations, const Vector& threshold,
                   double alpha, int lags) {
    RiskRow row;
    int x = 0;
    for (std::uint8_t v : violations) x += v;
    row.fail_rate = violations.empty()
                        ? std::numeric_limits<double>::quiet_NaN()
                        : static_cast<double>(x) / static_cast<double>(violations.size());
    row.uc = kupiec_uc(violations, alpha);
    row.cc = christoffersen_cc(violations, alpha);
    row.dq = engle_dq(violations, threshold, alpha, lags);
    return row;
}

void cmd_backtest(const BacktestOpts& o) {
    ReturnPanel panel = load_input(o.io);
    std::vector<std::string> tags = split_list(o.methods);
    if (tags.empty()) throw InputError("--method list is empty");

    ConfigMap meta;
    describe_input(o.io, meta);
    meta["methods"] = o.methods;
    meta["window"] = std::to_string(o.window);
    meta["holding"] = std::to_string(o.holding);
    meta["alpha"] = fmt(o.alpha);
    meta["sparsity"] = o.sparsity;
    meta["leverage"] = o.leverage ? "true" : "false";
    meta["dq_lags"] = std::to_string(o.dq_lags);
    meta["seed"] = std::to_string(o.seed);

    std::string metrics_csv = csv_header("backtest", meta) + "method,av,sd,sr,to\n";
    std::string risk_csv = csv_header("backtest", meta) +
                           "method,measure,n,fail_rate,uc_stat,uc_p,cc_stat,cc_p,dq_stat,dq_p\n";
    std::string reb_csv =
        csv_header("backtest", meta) + "method,day,failed,turnover_l1\n";

    std::vector<BacktestLedger> ledgers;
    std::vector<PerfReport> reports;
    for (const std::string& tag : tags) {
        BacktestConfig cfg;
        cfg.window = o.window;
        cfg.holding = o.holding;
        cfg.estimator = estimator_from_tag(tag);
        cfg.sparsity = parse_sparsity(o.sparsity);
        cfg.leverage = o.leverage;
        cfg.seed = o.seed;
        BacktestLedger ledger = rolling_backtest(panel.values, cfg);
        PerfReport perf = performance_metrics(ledger);
        metrics_csv += tag + "," + fmt(perf.av) + "," + fmt(perf.sd) + "," + fmt(perf.sr) +
                       "," + fmt(perf.turnover) + "\n";

        RiskPath rp = portfolio_risk_path(ledger.daily_returns, o.alpha, true);
        RiskRow var_row = risk_tests(rp.var_violation, rp.var, o.alpha, o.dq_lags);
        RiskRow es_row = risk_tests(rp.es_violation, rp.es, o.alpha, o.dq_lags);
        const std::string n = std::to_string(ledger.daily_returns.size());
        auto risk_line = [&](const char* measure, const RiskRow& row) {
            risk_csv += tag + "," + measure + "," + n + "," + fmt(row.fail_rate) + "," +
                        fmt(row.uc.statistic) + "," + fmt(row.uc.p_value) + "," +
                        fmt(row.cc.statistic) + "," + fmt(row.cc.p_value) + "," +
                        fmt(row.dq.statistic) + "," + fmt(row.dq.p_value) + "\n";
        };
        risk_line("var", var_row);
        risk_line("es", es_row);

        for (Eigen::Index h = 0; h < ledger.target_weights.rows(); ++h) {
            bool failed = std::find(ledger.failed_rebalances.begin(),
                                    ledger.failed_rebalances.end(),
                                    ledger.rebalance_index[static_cast<std::size_t>(h)]) !=
                          ledger.failed_rebalances.end();
            double to = (ledger.target_weights.row(h) - ledger.prereb_weights.row(h))
                            .cwiseAbs()
                            .sum();
            reb_csv += tag + "," +
                       std::to_string(ledger.rebalance_index[static_cast<std::size_t>(h)]) +
                       "," + (failed ? "1" : "0") + "," + fmt(to) + "\n";
        }
        ledgers.push_back(std::move(ledger));
        reports.push_back(perf);
    }

    // Daily out-of-sample returns, one column per method (plot-ready).
    std::string ret_csv = csv_header("backtest", meta) + "day,date";
    for (const std::string& tag : tags) ret_csv += "," + tag;
    ret_csv += "\n";
    const Eigen::Index n_days = ledgers.front().daily_returns.size();
    for (Eigen::Index i = 0; i < n_days; ++i) {
        int day = ledgers.front().day_index[static_cast<std::size_t>(i)];
        ret_csv += std::to_string(day) + "," + panel.dates[static_cast<std::size_t>(day)];
        for (const BacktestLedger& l : ledgers) ret_csv += "," + fmt(l.daily_returns[i]);
        ret_csv += "\n";
    }

    // Pairwise performance comparisons.
    std::string pair_csv =
        csv_header("backtest", meta) +
        "method_a,method_b,t_stat,t_p,f_stat,f_p,sharpe_diff_annual,sharpe_p\n";
    for (std::size_t a = 0; a < tags.size(); ++a)
        for (std::size_t b = a + 1; b < tags.size(); ++b) {
            const Vector& ra = ledgers[a].daily_returns;
            const Vector& rb = ledgers[b].daily_returns;
            TestResult tt = two_sample_t(ra, rb);
            TestResult ft = variance_f(ra, rb);
            TestResult sb = sharpe_diff_bootstrap(
                ra, rb, 0, 1000, Rng::substream(o.seed, "sharpe", a, b).raw());
            double sd_diff = reports[a].sr - reports[b].sr;
            pair_csv += tags[a] + "," + tags[b] + "," + fmt(tt.statistic) + "," +
                        fmt(tt.p_value) + "," + fmt(ft.statistic) + "," + fmt(ft.p_value) +
                        "," + fmt(sd_diff) + "," + fmt(sb.p_value) + "\n";
        }

    auto dir = ensure_outdir(o.out);
    write_file(dir / "metrics.csv", metrics_csv);
    write_file(dir / "risk.csv", risk_csv);
    write_file(dir / "pairwise.csv", pair_csv);
    write_file(dir / "returns.csv", ret_csv);
    write_file(dir / "rebalances.csv", reb_csv);
}

// --------------------------------------------------------------- risk ----

struct RiskOpts {
    InputOpts io;
    double alpha = 0.05;
    bool no_leverage = false;
    int dq_lags = 4;
    std::string out = ".";
};

void cmd_risk(const RiskOpts& o) {
    ReturnPanel panel = load_input(o.io);
    if (panel.values.cols() != 1)
        throw InputError("risk expects a single return series (one value column)");
    RiskPath rp = portfolio_risk_path(panel.values.col(0), o.alpha, !o.no_leverage);

    ConfigMap meta;
    describe_input(o.io, meta);
    meta["alpha"] = fmt(o.alpha);
    meta["leverage"] = o.no_leverage ? "false" : "true";
    meta["dq_lags"] = std::to_string(o.dq_lags);

    std::string csv = csv_header("risk", meta) +
                      "date,return,sigma,var,es,var_violation,es_violation\n";
    for (Eigen::Index i = 0; i < rp.sigma.size(); ++i)
        csv += panel.dates[static_cast<std::size_t>(i)] + "," +
               fmt(panel.values(i, 0)) + "," + fmt(rp.sigma[i]) + "," + fmt(rp.var[i]) +
               "," + fmt(rp.es[i]) + "," +
               std::to_string(rp.var_violation[static_cast<std::size_t>(i)]) + "," +
               std::to_string(rp.es_violation[static_cast<std::size_t>(i)]) + "\n";

    RiskRow var_row = risk_tests(rp.var_violation, rp.var, o.alpha, o.dq_lags);
    RiskRow es_row = risk_tests(rp.es_violation, rp.es, o.alpha, o.dq_lags);
    json j;
    j["command"] = "risk";
    j["config"] = config_json(meta);
    j["n"] = rp.var_violation.size();
    j["var"] = {{"fail_rate", fmt(var_row.fail_rate)},
                {"uc", test_json(var_row.uc)},
                {"cc", test_json(var_row.cc)},
                {"dq", test_json(var_row.dq)}};
    j["es"] = {{"fail_rate", fmt(es_row.fail_rate)},
               {"uc", test_json(es_row.uc)},
               {"cc", test_json(es_row.cc)},
               {"dq", test_json(es_row.dq)}};

    auto dir = ensure_outdir(o.out);
    write_file(dir / "risk_path.csv", csv);
    write_file(dir / "risk_tests.json", j.dump(2) + "\n");
}

// ------------------------------------------------------------- report ----

struct ReportOpts {
    InputOpts io;
    std::string method = "dcs-rho";
    bool leverage = false;
    int lags = 10;
    std::string out = ".";
};

void cmd_report(const ReportOpts& o) {
    ReturnPanel panel = load_input(o.io);
    RankMethod method = method_from_tag(o.method);
    DcsModel model = fit_dcs(panel.values, method, o.leverage);
    FitStats stats = model_loglik_aic_bic(model);

    // Scores: always computed for the diagnostic battery, even for the
    // pearson baseline whose recursion runs on raw residuals.
    Matrix scores = method == RankMethod::pearson ? score_panel(model.residuals).scores
                                                  : model.driver;

    ConfigMap meta;
    describe_input(o.io, meta);
    meta["method"] = o.method;
    meta["leverage"] = o.leverage ? "true" : "false";
    meta["lags"] = std::to_string(o.lags);

    const Eigen::Index p = model.residuals.cols();
    double jb_res_sum = 0.0, jb_score_sum = 0.0;
    json assets = json::array();
    Reference normal_ref;  // standard normal
    for (Eigen::Index j = 0; j < p; ++j) {
        TestResult jb_res = jarque_bera(model.residuals.col(j));
        TestResult jb_score = jarque_bera(scores.col(j));
        TestResult ks = ks_test(scores.col(j), normal_ref);
        jb_res_sum += jb_res.statistic;
        jb_score_sum += jb_score.statistic;
        json a;
        a["ticker"] = panel.tickers[static_cast<std::size_t>(j)];
        a["jb_residual"] = test_json(jb_res);
        a["jb_score"] = test_json(jb_score);
        a["ks_score_normal"] = test_json(ks);
        assets.push_back(std::move(a));
    }

    json j;
    j["command"] = "report";
    j["config"] = config_json(meta);
    j["method"] = o.method;
    j["alpha"] = fmt(model.phi.alpha);
    j["beta"] = fmt(model.phi.beta);
    j["loglik"] = fmt(stats.loglik);
    j["aic"] = fmt(stats.aic);
    j["bic"] = fmt(stats.bic);
    j["jb_residual_sum"] = {{"statistic", fmt(jb_res_sum)},
                            {"p_value", fmt(chi2_sf(jb_res_sum, 2.0 * p))}};
    j["jb_score_sum"] = {{"statistic", fmt(jb_score_sum)},
                         {"p_value", fmt(chi2_sf(jb_score_sum, 2.0 * p))}};
    j["portmanteau"] = test_json(portmanteau(decorrelated_driver(model), o.lags, 2));
    j["per_asset"] = std::move(assets);

    auto dir = ensure_outdir(o.out);
    write_file(dir / "report.json", j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic rank-based conditional correlation toolkit"};
    app.require_subcommand(1);

    FitOpts fit_opts;
    CLI::App* fit = app.add_subcommand("fit", "fit the correlation model to a panel");
    add_input_opts(fit, fit_opts.io);
    fit->add_option("--method", fit_opts.method, "dcc | dcs-tau | dcs-rho")
        ->check(CLI::IsMember({"dcc", "dcs-tau", "dcs-rho"}));
    fit->add_flag("--leverage", fit_opts.leverage, "GJR asymmetry term in the GARCH stage");
    fit->add_flag("--rt-csv", fit_opts.rt_csv, "also write the fitted correlation path");
    fit->add_option("--lags", fit_opts.lags, "portmanteau lag depth");
    fit->add_option("--out", fit_opts.out, "output directory");

    SimulateOpts sim_opts;
    CLI::App* sim = app.add_subcommand("simulate", "parameter-recovery study");
    sim->add_option("--grid", sim_opts.grid,
                    "cells, e.g. \"p=10,50 T=1000,2000 delta=0.01,0.10\"");
    sim->add_option("--reps", sim_opts.reps, "replications per cell");
    sim->add_option("--estimators", sim_opts.estimators,
                    "comma list of dcc,dcs-tau,dcs-rho");
    sim->add_option("--dgp-alpha", sim_opts.dgp_alpha, "true recursion alpha");
    sim->add_option("--dgp-beta", sim_opts.dgp_beta, "true recursion beta");
    sim->add_option("--seed", sim_opts.seed, "root seed");
    sim->add_option("--out", sim_opts.out, "output directory");

    BacktestOpts bt_opts;
    CLI::App* bt = app.add_subcommand("backtest", "rolling minimum-variance backtest");
    add_input_opts(bt, bt_opts.io);
    bt->add_option("--method", bt_opts.methods,
                   "comma list of dcc,dcs-tau,dcs-rho,ew");
    bt->add_option("--window", bt_opts.window, "estimation window length");
    bt->add_option("--holding", bt_opts.holding, "days between rebalances");
    bt->add_option("--alpha", bt_opts.alpha, "tail level for the risk backtest");
    bt->add_option("--sparsity", bt_opts.sparsity, "none | lambda=<v> | stars");
    bt->add_flag("--leverage", bt_opts.leverage, "GJR asymmetry in asset GARCH fits");
    bt->add_option("--dq-lags", bt_opts.dq_lags, "hit lags in the DQ regression");
    bt->add_option("--seed", bt_opts.seed, "root seed");
    bt->add_option("--out", bt_opts.out, "output directory");

    RiskOpts risk_opts;
    CLI::App* risk = app.add_subcommand("risk", "tail-risk path and coverage tests");
    add_input_opts(risk, risk_opts.io);
    risk->get_option("--input-kind")->default_str("returns");
    risk_opts.io.kind = "returns";
    risk->add_option("--alpha", risk_opts.alpha, "tail level");
    risk->add_flag("--no-leverage", risk_opts.no_leverage,
                   "plain GARCH instead of GJR for the volatility path");
    risk->add_option("--dq-lags", risk_opts.dq_lags, "hit lags in the DQ regression");
    risk->add_option("--out", risk_opts.out, "output directory");

    ReportOpts rep_opts;
    CLI::App* rep = app.add_subcommand("report", "distributional diagnostics battery");
    add_input_opts(rep, rep_opts.io);
    rep->add_option("--method", rep_opts.method, "dcc | dcs-tau | dcs-rho")
        ->check(CLI::IsMember({"dcc", "dcs-tau", "dcs-rho"}));
    rep->add_flag("--leverage", rep_opts.leverage, "GJR asymmetry in the GARCH stage");
    rep->add_option("--lags", rep_opts.lags, "portmanteau lag depth");
    rep->add_option("--out", rep_opts.out, "output directory");

    std::map<CLI::App*, std::string> config_paths;
    for (CLI::App* sub : {fit, sim, bt, risk, rep})
        sub->add_option("--config", config_paths[sub],
                        "key=value config file (command-line flags override)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (const auto& [sub, path] : config_paths)
            if (sub->parsed()) apply_config_file(sub, path);
        if (fit->parsed()) cmd_fit(fit_opts);
        if (sim->parsed()) cmd_simulate(sim_opts);
        if (bt->parsed()) cmd_backtest(bt_opts);
        if (risk->parsed()) cmd_risk(risk_opts);
        if (rep->parsed()) cmd_report(rep_opts);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "convergence error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
