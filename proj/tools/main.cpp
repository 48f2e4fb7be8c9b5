// Command line front end: simulation tables, size sweeps, closed-form limit
// tables, CSV backtests, and threshold cross-validation, all driven by a
// sectioned key=value config that individual flags override.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
// failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "minvar/cov_estimators.hpp"
#include "minvar/experiments.hpp"
#include "minvar/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace minvar;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int classify(const std::exception& e) {
    if (dynamic_cast<const InvalidInput*>(&e)) {
        return kExitConfig;
    }
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const NoEligibleAssets*>(&e)) {
        return kExitData;
    }
    if (dynamic_cast<const Error*>(&e)) {
        return kExitNumerical;
    }
    return 1;
}

// Flags shared by every subcommand; unset optionals leave the config value
// (or its default) in force.
struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> tau;
    std::optional<int> reps;
    std::optional<std::string> out;
    std::optional<int> threads;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Sectioned key=value config file");
    cmd->add_option("--seed", flags.seed, "Base seed; replication k uses seed + k");
    cmd->add_option("--tau", flags.tau, "Ridge level (default 1e-8)");
    cmd->add_option("--reps", flags.reps, "Monte Carlo replications");
    cmd->add_option("--out", flags.out, "Output directory (default 'out')");
    cmd->add_option("--threads", flags.threads, "Worker threads for replications");
}

// Config file first, then flag overrides, so the canonical dump (and its
// hash) reflects exactly what ran.
Config resolve_config(const CommonFlags& flags, const std::string& section) {
    Config cfg;
    if (!flags.config_path.empty()) {
        cfg = Config::parse_file(flags.config_path);
    }
    if (flags.seed) {
        cfg.set(section, "seed", std::to_string(*flags.seed));
    }
    if (flags.tau) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", *flags.tau);
        cfg.set(section, "tau", buf);
    }
    if (flags.reps) {
        cfg.set(section, "reps", std::to_string(*flags.reps));
    }
    if (flags.threads) {
        cfg.set(section, "threads", std::to_string(*flags.threads));
    }
    if (flags.out) {
        cfg.set("output", "dir", *flags.out);
    }
    return cfg;
}

std::string out_dir(const Config& cfg) {
    const std::string dir = cfg.get("output", "dir", "out");
    fs::create_directories(dir);
    return dir;
}

DgpConfig dgp_from_config(const Config& cfg) {
    DgpConfig dgp;
    const long long setting = cfg.get_int("dgp", "setting", 1);
    if (setting != 1 && setting != 2) {
        throw InvalidInput("config dgp.setting: must be 1 or 2");
    }
    dgp.setting = setting == 1 ? Setting::setting1 : Setting::setting2;
    dgp.r = static_cast<int>(cfg.get_int("dgp", "r", 1));
    dgp.loading_lo = cfg.get_real("dgp", "loading_lo", 0.5);
    dgp.loading_hi = cfg.get_real("dgp", "loading_hi", 1.5);
    dgp.sigma2 = cfg.get_real("dgp", "sigma2", 1.0);
    dgp.omega.diag_lo = cfg.get_real("dgp", "diag_lo", 0.5);
    dgp.omega.diag_hi = cfg.get_real("dgp", "diag_hi", 2.0);
    dgp.omega.offdiag_density = cfg.get_real("dgp", "offdiag_density", 0.02);
    dgp.omega.offdiag_lo = cfg.get_real("dgp", "offdiag_lo", 0.05);
    dgp.omega.offdiag_hi = cfg.get_real("dgp", "offdiag_hi", 0.3);
    dgp.omega.soft_threshold = cfg.get_real("dgp", "soft_threshold", 0.01);
    dgp.omega.pd_floor = cfg.get_real("dgp", "pd_floor", 0.05);
    dgp.seed = static_cast<std::uint64_t>(cfg.get_int("dgp", "seed", 1));
    return dgp;
}

EstimatorOptions estimator_from_config(const Config& cfg, const std::string& section,
                                       bool demean_default, bool cv_default) {
    EstimatorOptions opts;
    opts.tau = cfg.get_real(section, "tau", kDefaultTau);
    opts.demean = cfg.get_bool(section, "demean", demean_default);
    opts.r_max = static_cast<int>(cfg.get_int(section, "r_max", 8));
    opts.c1 = cfg.get_real(section, "c1", 0.5);
    opts.c1_cv = cfg.get_bool(section, "c1_cv", cv_default);
    opts.c1_grid = parse_real_list(cfg.get_list(section, "c1_grid", {}));
    opts.cv_folds = static_cast<int>(cfg.get_int(section, "cv_folds", 5));
    return opts;
}

std::vector<EstimatorKind> methods_from_config(const Config& cfg,
                                               const std::string& section,
                                               const std::vector<std::string>& fallback) {
    std::vector<EstimatorKind> out;
    for (const std::string& name : cfg.get_list(section, "methods", fallback)) {
        out.push_back(estimator_from_string(name));
    }
    return out;
}

int report_failures(const std::vector<SimulateRow>& rows) {
    int total = 0;
    for (const auto& r : rows) {
        if (r.failures > 0) {
            std::cerr << "warning: " << r.method << " failed " << r.failures
                      << " replications at N=" << r.n << " T=" << r.t << "\n";
            total += r.failures;
        }
    }
    return total;
}

int cmd_simulate(const CommonFlags& flags, const std::vector<std::string>& method_flags) {
    SimulateConfig sc;
    Config cfg;
    std::string dir;
    try {
        cfg = resolve_config(flags, "simulate");
        if (!method_flags.empty()) {
            std::string joined;
            for (const auto& m : method_flags) {
                joined += (joined.empty() ? "" : ",") + m;
            }
            cfg.set("simulate", "methods", joined);
        }
        sc.dgp = dgp_from_config(cfg);
        sc.n_list = parse_int_list(cfg.get_list("simulate", "n_list", {"400"}));
        sc.t_list = parse_int_list(cfg.get_list("simulate", "t_list", {"22"}));
        sc.methods = methods_from_config(cfg, "simulate", {"ridgelet1", "equal"});
        sc.replications = static_cast<int>(cfg.get_int("simulate", "reps", 100));
        sc.seed = static_cast<std::uint64_t>(cfg.get_int("simulate", "seed", 1));
        sc.dist = innovation_from_string(cfg.get("simulate", "dist", "gaussian"));
        sc.estimator = estimator_from_config(cfg, "simulate", false, false);
        sc.threads = static_cast<int>(cfg.get_int("simulate", "threads", 1));
        dir = out_dir(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const auto rows = run_simulate(sc);
        const std::string path = (fs::path(dir) / "simulate.csv").string();
        write_simulate_csv(rows, path, manifest_line(sc.seed, fnv1a64(cfg.canonical())));
        report_failures(rows);
        std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify(e);
    }
}

int cmd_sweep(const CommonFlags& flags) {
    SweepConfig sc;
    Config cfg;
    std::string dir;
    try {
        cfg = resolve_config(flags, "sweep");
        sc.dgp = dgp_from_config(cfg);
        sc.sweep_var = cfg.get("sweep", "sweep_var", "N");
        sc.values = parse_int_list(cfg.get_list("sweep", "values", {}));
        if (sc.values.empty()) {
            throw InvalidInput("config sweep.values: required");
        }
        sc.fixed = static_cast<int>(cfg.get_int("sweep", "fixed", 22));
        sc.methods = methods_from_config(cfg, "sweep", {"ridgelet1"});
        sc.replications = static_cast<int>(cfg.get_int("sweep", "reps", 50));
        sc.seed = static_cast<std::uint64_t>(cfg.get_int("sweep", "seed", 1));
        sc.dist = innovation_from_string(cfg.get("sweep", "dist", "gaussian"));
        sc.estimator = estimator_from_config(cfg, "sweep", false, false);
        sc.threads = static_cast<int>(cfg.get_int("sweep", "threads", 1));
        dir = out_dir(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const auto rows = run_sweep(sc);
        const std::string path = (fs::path(dir) / "sweep.csv").string();
        write_sweep_csv(rows, path, manifest_line(sc.seed, fnv1a64(cfg.canonical())));
        std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify(e);
    }
}

int cmd_limits(const CommonFlags& flags) {
    LimitsConfig lc;
    Config cfg;
    std::string dir;
    std::uint64_t seed = 0;
    try {
        cfg = resolve_config(flags, "limits");
        lc.gammas = parse_real_list(cfg.get_list("limits", "gammas", {"0.5", "2", "4"}));
        lc.taus = parse_real_list(cfg.get_list("limits", "taus", {"1e-8"}));
        lc.sigma2 = cfg.get_real("limits", "sigma2", 1.0);
        seed = static_cast<std::uint64_t>(cfg.get_int("limits", "seed", 0));
        dir = out_dir(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const auto rows = run_limits(lc);
        const std::string path = (fs::path(dir) / "limits.csv").string();
        write_limits_csv(rows, path, manifest_line(seed, fnv1a64(cfg.canonical())));
        std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify(e);
    }
}

int cmd_backtest(const CommonFlags& flags, const std::string& input_flag) {
    Config cfg;
    BacktestConfig bc;
    std::string dir;
    std::string input;
    std::uint64_t seed = 0;
    try {
        cfg = resolve_config(flags, "backtest");
        if (!input_flag.empty()) {
            cfg.set("backtest", "input", input_flag);
        }
        input = cfg.get("backtest", "input", "");
        if (input.empty()) {
            throw InvalidInput("backtest needs an input CSV (--input or backtest.input)");
        }
        bc.train_window = static_cast<int>(cfg.get_int("backtest", "train_window", 22));
        bc.methods = methods_from_config(cfg, "backtest", {"ridgelet1", "equal"});
        bc.eligibility =
            eligibility_from_string(cfg.get("backtest", "eligibility", "complete"));
        bc.min_fraction = cfg.get_real("backtest", "min_fraction", 0.75);
        bc.fill = fill_from_string(cfg.get("backtest", "fill", "zero_fill"));
        bc.estimator = estimator_from_config(cfg, "backtest", true, true);
        seed = static_cast<std::uint64_t>(cfg.get_int("backtest", "seed", 0));
        dir = out_dir(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    ReturnPanel panel;
    try {
        panel = load_returns_csv(input);
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    try {
        const BacktestResult result = run_backtest(panel, bc);
        write_backtest_outputs(result, dir,
                               manifest_line(seed, fnv1a64(cfg.canonical())),
                               cfg.canonical());
        for (const auto& w : result.warnings) {
            std::cerr << "warning: " << w << "\n";
        }
        for (const auto& [method, risk] : result.annualized) {
            std::cout << method << " annualized_risk " << risk << "\n";
        }
        std::cout << "wrote " << result.months.size() << " month rows to " << dir
                  << "/results.csv\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify(e);
    }
}

int cmd_poet_cv(const CommonFlags& flags, const std::string& input_flag) {
    Config cfg;
    std::string dir;
    std::string input;
    std::vector<double> grid;
    int folds = 5;
    int r_max = 8;
    double tau = kDefaultTau;
    bool demean = false;
    std::uint64_t seed = 0;
    int synth_n = 0;
    int synth_t = 0;
    try {
        cfg = resolve_config(flags, "poet-cv");
        if (!input_flag.empty()) {
            cfg.set("poet-cv", "input", input_flag);
        }
        input = cfg.get("poet-cv", "input", "");
        grid = parse_real_list(cfg.get_list("poet-cv", "grid", {}));
        if (grid.empty()) {
            grid = default_c1_grid();
        }
        folds = static_cast<int>(cfg.get_int("poet-cv", "folds", 5));
        r_max = static_cast<int>(cfg.get_int("poet-cv", "r_max", 8));
        tau = cfg.get_real("poet-cv", "tau", kDefaultTau);
        demean = cfg.get_bool("poet-cv", "demean", false);
        seed = static_cast<std::uint64_t>(cfg.get_int("poet-cv", "seed", 1));
        synth_n = static_cast<int>(cfg.get_int("poet-cv", "n", 100));
        synth_t = static_cast<int>(cfg.get_int("poet-cv", "t", 60));
        if (input.empty() && !cfg.has("dgp", "setting")) {
            throw InvalidInput(
                "poet-cv needs an input CSV (--input) or a [dgp] section to simulate");
        }
        dir = out_dir(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    ReturnPanel panel;
    try {
        if (!input.empty()) {
            panel = load_returns_csv(input);
        } else {
            const FactorModelSpec model = build_model(dgp_from_config(cfg), synth_n);
            panel = sample_returns(model, synth_t, Innovation::gaussian, seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    try {
        const PoetCvResult cv = poet_cv_scores(panel, grid, folds, r_max, tau, demean);
        const std::string path = (fs::path(dir) / "cv_scores.csv").string();
        CsvWriter out(path, manifest_line(seed, fnv1a64(cfg.canonical())), "c1,score");
        char buf[64];
        for (std::size_t i = 0; i < cv.grid.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g", cv.grid[i], cv.scores[i]);
            out.add_row(buf);
        }
        std::cout << "chosen_c1 " << cv.chosen_c1 << "\n";
        std::cout << "wrote " << cv.grid.size() << " rows to " << path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify(e);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High dimensional minimum variance portfolios: simulation, "
                 "asymptotic limits, and backtesting"};
    app.set_version_flag("--version", minvar::kVersion);
    app.require_subcommand(1);

    CommonFlags sim_flags;
    std::vector<std::string> sim_methods;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo risk table for a factor model");
    add_common_flags(sim, sim_flags);
    sim->add_option("--methods", sim_methods, "Comma separated method names")
        ->delimiter(',');

    CommonFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "Risk versus N or T around the N = T spike");
    add_common_flags(sweep, sweep_flags);

    CommonFlags limits_flags;
    auto* limits = app.add_subcommand("limits", "Closed-form risk limits over a (gamma, tau) grid");
    add_common_flags(limits, limits_flags);

    CommonFlags bt_flags;
    std::string bt_input;
    auto* bt = app.add_subcommand("backtest", "Monthly rebalanced backtest on a returns CSV");
    add_common_flags(bt, bt_flags);
    bt->add_option("--input", bt_input, "Returns CSV (date column + one column per asset)");

    CommonFlags cv_flags;
    std::string cv_input;
    auto* cv = app.add_subcommand("poet-cv", "Cross-validate the covariance threshold constant");
    add_common_flags(cv, cv_flags);
    cv->add_option("--input", cv_input, "Returns CSV to cross-validate on");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (sim->parsed()) {
        return cmd_simulate(sim_flags, sim_methods);
    }
    if (sweep->parsed()) {
        return cmd_sweep(sweep_flags);
    }
    if (limits->parsed()) {
        return cmd_limits(limits_flags);
    }
    if (bt->parsed()) {
        return cmd_backtest(bt_flags, bt_input);
    }
    if (cv->parsed()) {
        return cmd_poet_cv(cv_flags, cv_input);
    }
    return kExitConfig;
}
