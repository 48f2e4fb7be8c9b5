// End-to-end runs of the installed binary: exit codes, manifest-stamped
// outputs, flag-over-config precedence, and bit-identical reruns.

#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "minvar/factor_dgp.hpp"
#include "minvar/io.hpp"

namespace fs = std::filesystem;
using namespace minvar;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(static_cast<bool>(out));
    out << text;
}

// Fresh scratch directory per test case; contents from earlier runs are gone.
fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "minvar_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliRun run_cli(const std::string& args, const fs::path& scratch) {
    const fs::path out_file = scratch / "stdout.txt";
    const fs::path err_file = scratch / "stderr.txt";
    const std::string cmd = std::string("\"") + MINVAR_CLI_PATH + "\" " + args + " > \"" +
                            out_file.string() + "\" 2> \"" + err_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        lines.push_back(line);
    }
    return lines;
}

// Rows below the manifest/header preamble, skipping comment lines.
std::vector<std::string> data_rows(const fs::path& csv) {
    const auto lines = lines_of(slurp(csv));
    REQUIRE(lines.size() >= 2);
    REQUIRE(lines[0].rfind("# manifest:", 0) == 0);
    std::vector<std::string> rows;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        if (!lines[i].empty() && lines[i][0] != '#') {
            rows.push_back(lines[i]);
        }
    }
    return rows;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version flag prints the library version") {
    const fs::path dir = fresh_dir("version");
    const CliRun r = run_cli("--version", dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "0.1.0"));
}

TEST_CASE("parse failures exit with the config code") {
    const fs::path dir = fresh_dir("parse_fail");
    CHECK(run_cli("", dir).code == 2);
    CHECK(run_cli("frobnicate", dir).code == 2);
    CHECK(run_cli("simulate --no-such-flag 3", dir).code == 2);
}

TEST_CASE("missing config file exits with the config code") {
    const fs::path dir = fresh_dir("missing_config");
    const CliRun r = run_cli("limits --config " + (dir / "nope.ini").string(), dir);
    CHECK(r.code == 2);
    CHECK(contains(r.err, "config error"));
    CHECK(contains(r.err, "nope.ini"));
}

TEST_CASE("limits runs on built-in defaults") {
    const fs::path dir = fresh_dir("limits_default");
    const fs::path out = dir / "out";
    const CliRun r = run_cli("limits --out " + out.string(), dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "wrote 3 rows"));

    const auto lines = lines_of(slurp(out / "limits.csv"));
    REQUIRE(lines.size() == 5);
    CHECK(contains(lines[0], "# manifest: tool=minvar version=0.1.0 seed=0"));
    CHECK(lines[1] == "gamma,tau,m,c,rv_limit");
    // Default grid is gamma in {0.5, 2, 4} at tau = 1e-8.
    CHECK(lines[2].rfind("0.5,1e-08,", 0) == 0);
    CHECK(lines[3].rfind("2,1e-08,", 0) == 0);
    CHECK(lines[4].rfind("4,1e-08,", 0) == 0);
}

TEST_CASE("simulate writes a manifest stamped table and reruns byte for byte") {
    const fs::path dir = fresh_dir("simulate_basic");
    const fs::path cfg = dir / "run.ini";
    write_text(cfg,
               "[dgp]\n"
               "setting = 1\n"
               "r = 1\n"
               "seed = 7\n"
               "\n"
               "[simulate]\n"
               "n_list = 6, 8\n"
               "t_list = 30\n"
               "methods = plugin, equal\n"
               "reps = 4\n"
               "seed = 3\n");
    const fs::path out = dir / "out";
    const std::string args =
        "simulate --config " + cfg.string() + " --out " + out.string();

    const CliRun r = run_cli(args, dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "wrote 4 rows"));
    CHECK(r.err.empty());

    const fs::path csv = out / "simulate.csv";
    const auto lines = lines_of(slurp(csv));
    REQUIRE(lines.size() >= 2);
    CHECK(contains(lines[0], "seed=3 config_hash=0x"));
    CHECK(lines[1] == "setting,dist,N,T,method,rr_mean,rr_sd,rv_mean,reps,seed,failures");
    const auto rows = data_rows(csv);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("1,gaussian,6,30,plugin,", 0) == 0);
    CHECK(rows[1].rfind("1,gaussian,6,30,equal,", 0) == 0);
    CHECK(rows[2].rfind("1,gaussian,8,30,plugin,", 0) == 0);
    CHECK(rows[3].rfind("1,gaussian,8,30,equal,", 0) == 0);

    // Same command, same bytes; the config (hence hash) is unchanged.
    const std::string first = slurp(csv);
    fs::remove(csv);
    CHECK(run_cli(args, dir).code == 0);
    CHECK(slurp(csv) == first);
}

TEST_CASE("command line flags override config values") {
    const fs::path dir = fresh_dir("flag_override");
    const fs::path cfg = dir / "run.ini";
    write_text(cfg,
               "[dgp]\n"
               "setting = 1\n"
               "\n"
               "[simulate]\n"
               "n_list = 5\n"
               "t_list = 20\n"
               "methods = equal\n"
               "reps = 6\n"
               "seed = 3\n");
    const fs::path out = dir / "out";
    const CliRun r = run_cli("simulate --config " + cfg.string() + " --seed 9 --reps 2 --out " +
                                 out.string(),
                             dir);
    CHECK(r.code == 0);

    const auto lines = lines_of(slurp(out / "simulate.csv"));
    CHECK(contains(lines[0], "seed=9"));
    REQUIRE(lines.size() == 3);
    // reps column reflects the flag, not the config file.
    CHECK(contains(lines[2], ",equal,"));
    CHECK(contains(lines[2], ",2,9,0"));
}

TEST_CASE("simulate reports per cell estimation failures on stderr") {
    const fs::path dir = fresh_dir("simulate_failures");
    const fs::path cfg = dir / "run.ini";
    // Zero variance portfolios need N > T; at N=6, T=30 every draw is infeasible.
    write_text(cfg,
               "[simulate]\n"
               "n_list = 6\n"
               "t_list = 30\n"
               "methods = exact_zvp\n"
               "reps = 3\n");
    const CliRun r =
        run_cli("simulate --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
    CHECK(r.code == 0);
    CHECK(contains(r.err, "exact_zvp failed 3 replications at N=6 T=30"));
    const auto rows = data_rows(dir / "out" / "simulate.csv");
    REQUIRE(rows.size() == 1);
    CHECK(contains(rows[0], ",0,1,3"));  // reps=0 survived, seed=1, failures=3
}

TEST_CASE("unknown method names exit with the config code") {
    const fs::path dir = fresh_dir("bad_method");
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, "[simulate]\nmethods = frobulated\n");
    const CliRun r =
        run_cli("simulate --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
    CHECK(r.code == 2);
    CHECK(contains(r.err, "config error"));
}

TEST_CASE("sweep requires an explicit value list") {
    const fs::path dir = fresh_dir("sweep");
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, "[sweep]\nreps = 2\n");
    CHECK(run_cli("sweep --config " + cfg.string(), dir).code == 2);

    write_text(cfg,
               "[sweep]\n"
               "sweep_var = N\n"
               "values = 6, 10\n"
               "fixed = 30\n"
               "methods = plugin\n"
               "reps = 2\n");
    const fs::path out = dir / "out";
    const CliRun r = run_cli("sweep --config " + cfg.string() + " --out " + out.string(), dir);
    CHECK(r.code == 0);
    const auto lines = lines_of(slurp(out / "sweep.csv"));
    REQUIRE(lines.size() >= 2);
    CHECK(lines[1] ==
          "sweep_var,value,method,oos_risk_mean,insample_risk_mean,oracle_risk,reps,failures");
    const auto rows = data_rows(out / "sweep.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].rfind("N,6,plugin,", 0) == 0);
    CHECK(rows[1].rfind("N,10,plugin,", 0) == 0);
}

TEST_CASE("backtest distinguishes config errors from data errors") {
    const fs::path dir = fresh_dir("backtest_errors");
    CliRun r = run_cli("backtest", dir);
    CHECK(r.code == 2);
    CHECK(contains(r.err, "config error"));
    CHECK(contains(r.err, "input"));

    r = run_cli("backtest --input " + (dir / "absent.csv").string(), dir);
    CHECK(r.code == 3);
    CHECK(contains(r.err, "data error"));

    const fs::path bad = dir / "bad.csv";
    write_text(bad, "date,AAA\n2020-01-01,oops\n");
    r = run_cli("backtest --input " + bad.string(), dir);
    CHECK(r.code == 3);
    CHECK(contains(r.err, "data error"));
    CHECK(contains(r.err, "bad number"));
}

TEST_CASE("backtest writes results weights and a manifest echoing the config") {
    const fs::path dir = fresh_dir("backtest_run");
    const fs::path panel_csv = dir / "panel.csv";
    {
        const FactorModelSpec model = build_setting1(6, 1, {0.5, 1.5}, 1.0, 11);
        const ReturnPanel panel = sample_returns(model, 130, Innovation::gaussian, 11);
        write_returns_csv(panel, panel_csv.string());
    }
    const fs::path cfg = dir / "run.ini";
    write_text(cfg,
               "[backtest]\n"
               "train_window = 22\n"
               "methods = ridgelet1, equal\n");
    const fs::path out = dir / "out";
    const CliRun r = run_cli("backtest --config " + cfg.string() + " --input " +
                                 panel_csv.string() + " --out " + out.string(),
                             dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "ridgelet1 annualized_risk "));
    CHECK(contains(r.out, "equal annualized_risk "));
    CHECK(contains(r.out, "month rows to " + out.string()));

    const auto lines = lines_of(slurp(out / "results.csv"));
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0].rfind("# manifest: tool=minvar version=0.1.0 seed=0", 0) == 0);
    CHECK(lines[1] == "date,method,universe,realized_sd,failed");
    const auto rows = data_rows(out / "results.csv");
    REQUIRE(rows.size() >= 4);
    CHECK(rows.size() % 2 == 0);  // two methods per scheduled month
    for (const auto& row : rows) {
        CHECK(contains(row, ",6,"));  // complete panel, full universe
        CHECK(row.back() == '0');
    }

    std::size_t weight_files = 0;
    for (const auto& entry : fs::directory_iterator(out / "weights")) {
        ++weight_files;
        const auto wlines = lines_of(slurp(entry.path()));
        REQUIRE(wlines.size() == 2 + 6);
        CHECK(wlines[1] == "asset_id,weight");
        CHECK(wlines[2].rfind("A0001,", 0) == 0);
    }
    CHECK(weight_files == rows.size());

    const std::string manifest = slurp(out / "manifest.txt");
    CHECK(contains(manifest, "# manifest: tool=minvar"));
    CHECK(contains(manifest, "backtest.train_window=22"));
    CHECK(contains(manifest, "backtest.methods=ridgelet1, equal"));
    CHECK(contains(manifest, "output.dir=" + out.string()));
}

TEST_CASE("poet cv prints the chosen constant and writes the score table") {
    const fs::path dir = fresh_dir("poet_cv");
    const fs::path cfg = dir / "run.ini";
    write_text(cfg,
               "[dgp]\n"
               "setting = 1\n"
               "r = 1\n"
               "seed = 5\n"
               "\n"
               "[poet-cv]\n"
               "n = 40\n"
               "t = 36\n"
               "grid = 0.25, 0.5, 1\n"
               "folds = 3\n"
               "seed = 5\n");
    const fs::path out = dir / "out";
    const CliRun r =
        run_cli("poet-cv --config " + cfg.string() + " --out " + out.string(), dir);
    CHECK(r.code == 0);
    REQUIRE(r.out.rfind("chosen_c1 ", 0) == 0);
    const double chosen = std::stod(r.out.substr(10));
    const bool on_grid = chosen == 0.25 || chosen == 0.5 || chosen == 1.0;
    CHECK(on_grid);

    const auto lines = lines_of(slurp(out / "cv_scores.csv"));
    REQUIRE(lines.size() == 5);
    CHECK(lines[1] == "c1,score");
    CHECK(lines[2].rfind("0.25,", 0) == 0);
    CHECK(lines[3].rfind("0.5,", 0) == 0);
    CHECK(lines[4].rfind("1,", 0) == 0);
}

TEST_CASE("poet cv without input or model section exits with the config code") {
    const fs::path dir = fresh_dir("poet_cv_bare");
    const CliRun r = run_cli("poet-cv", dir);
    CHECK(r.code == 2);
    CHECK(contains(r.err, "config error"));
}

TEST_CASE("poet cv rejects more folds than observations after loading") {
    const fs::path dir = fresh_dir("poet_cv_folds");
    const fs::path cfg = dir / "run.ini";
    write_text(cfg,
               "[dgp]\n"
               "setting = 1\n"
               "\n"
               "[poet-cv]\n"
               "n = 10\n"
               "t = 8\n"
               "folds = 40\n");
    const CliRun r =
        run_cli("poet-cv --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
    CHECK(r.code == 2);
    CHECK(contains(r.err, "folds"));
}

}  // TEST_SUITE
