#include "minvar/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "minvar/cov_estimators.hpp"
#include "minvar/risk.hpp"
#include "minvar/rmt_limits.hpp"

namespace minvar {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

int setting_number(Setting s) {
    return s == Setting::setting1 ? 1 : 2;
}

}  // namespace

FactorModelSpec build_model(const DgpConfig& dgp, int n) {
    if (dgp.setting == Setting::setting1) {
        return build_setting1(n, dgp.r, {dgp.loading_lo, dgp.loading_hi}, dgp.sigma2,
                              dgp.seed);
    }
    return build_setting2(n, dgp.r, {dgp.loading_lo, dgp.loading_hi}, dgp.omega,
                          dgp.seed);
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (n <= 0) {
        return;
    }
    if (threads <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min(threads, n);
    pool.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        pool.emplace_back(worker);
    }
    for (auto& th : pool) {
        th.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

std::vector<SimulateRow> run_simulate(const SimulateConfig& config) {
    if (config.replications < 1) {
        throw InvalidInput("run_simulate: replications must be at least 1");
    }
    if (config.n_list.empty() || config.t_list.empty() || config.methods.empty()) {
        throw InvalidInput("run_simulate: empty size or method list");
    }
    std::vector<SimulateRow> rows;
    const std::size_t n_methods = config.methods.size();

    for (const int n : config.n_list) {
        const FactorModelSpec model = build_model(config.dgp, n);
        const ReturnSampler sampler(model);
        const OracleSolution oracle = oracle_of(model);

        for (const int t : config.t_list) {
            // rv[rep * n_methods + m]; empty slot means the estimator failed.
            std::vector<std::optional<double>> rv(
                static_cast<std::size_t>(config.replications) * n_methods);

            parallel_for(config.replications, config.threads, [&](int rep) {
                const ReturnPanel panel = sampler.sample(
                    t, config.dist, config.seed + static_cast<std::uint64_t>(rep));
                for (std::size_t m = 0; m < n_methods; ++m) {
                    const std::size_t slot = static_cast<std::size_t>(rep) * n_methods + m;
                    try {
                        const WeightVector w = estimate_weights(
                            config.methods[m], panel, config.estimator, &model);
                        rv[slot] = quadratic_form(w, oracle.sigma) / oracle.variance;
                    } catch (const Error&) {
                        rv[slot] = std::nullopt;
                    }
                }
            });

            for (std::size_t m = 0; m < n_methods; ++m) {
                SimulateRow row;
                row.setting = config.dgp.setting;
                row.dist = config.dist;
                row.n = n;
                row.t = t;
                row.method = to_string(config.methods[m]);
                row.seed = config.seed;
                double rr_sum = 0.0;
                double rr_sq = 0.0;
                double rv_sum = 0.0;
                int used = 0;
                for (int rep = 0; rep < config.replications; ++rep) {
                    const auto& slot =
                        rv[static_cast<std::size_t>(rep) * n_methods + m];
                    if (!slot) {
                        ++row.failures;
                        continue;
                    }
                    const double rr = relative_risk(*slot);
                    rr_sum += rr;
                    rr_sq += rr * rr;
                    rv_sum += *slot;
                    ++used;
                }
                row.reps = used;
                if (used > 0) {
                    row.rr_mean = rr_sum / used;
                    row.rv_mean = rv_sum / used;
                    row.rr_sd = used > 1 ? std::sqrt(std::max(
                                               (rr_sq - rr_sum * rr_sum / used) /
                                                   (used - 1),
                                               0.0))
                                         : 0.0;
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_simulate_csv(const std::vector<SimulateRow>& rows, const std::string& path,
                        const std::string& manifest) {
    CsvWriter out(path, manifest,
                  "setting,dist,N,T,method,rr_mean,rr_sd,rv_mean,reps,seed,failures");
    for (const auto& r : rows) {
        char head[64];
        std::snprintf(head, sizeof(head), "%d,%s,%d,%d,", setting_number(r.setting),
                      to_string(r.dist).c_str(), r.n, r.t);
        out.add_row(head + r.method + ',' + fmt(r.rr_mean) + ',' + fmt(r.rr_sd) + ',' +
                    fmt(r.rv_mean) + ',' + std::to_string(r.reps) + ',' +
                    std::to_string(r.seed) + ',' + std::to_string(r.failures));
    }
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    if (config.sweep_var != "N" && config.sweep_var != "T") {
        throw InvalidInput("run_sweep: sweep_var must be 'N' or 'T'");
    }
    if (config.values.empty() || config.methods.empty()) {
        throw InvalidInput("run_sweep: empty value or method list");
    }
    if (config.replications < 1) {
        throw InvalidInput("run_sweep: replications must be at least 1");
    }
    const bool sweep_n = config.sweep_var == "N";
    std::vector<SweepRow> rows;
    const std::size_t n_methods = config.methods.size();

    for (const int value : config.values) {
        const int n = sweep_n ? value : config.fixed;
        const int t = sweep_n ? config.fixed : value;
        const FactorModelSpec model = build_model(config.dgp, n);
        const ReturnSampler sampler(model);
        const OracleSolution oracle = oracle_of(model);

        struct Slot {
            std::optional<double> oos;
            std::optional<double> ins;
        };
        std::vector<Slot> slots(static_cast<std::size_t>(config.replications) *
                                n_methods);

        parallel_for(config.replications, config.threads, [&](int rep) {
            const ReturnPanel panel = sampler.sample(
                t, config.dist, config.seed + static_cast<std::uint64_t>(rep));
            const SymMatrix s0 = sample_cov(panel, config.estimator.demean);
            for (std::size_t m = 0; m < n_methods; ++m) {
                auto& slot = slots[static_cast<std::size_t>(rep) * n_methods + m];
                try {
                    const WeightVector w = estimate_weights(config.methods[m], panel,
                                                            config.estimator, &model);
                    slot.oos = std::sqrt(quadratic_form(w, oracle.sigma));
                    slot.ins = std::sqrt(std::max(quadratic_form(w, s0), 0.0));
                } catch (const Error&) {
                    slot.oos = std::nullopt;
                    slot.ins = std::nullopt;
                }
            }
        });

        for (std::size_t m = 0; m < n_methods; ++m) {
            SweepRow row;
            row.sweep_var = config.sweep_var;
            row.value = value;
            row.method = to_string(config.methods[m]);
            row.oracle_risk = std::sqrt(oracle.variance);
            double oos = 0.0;
            double ins = 0.0;
            int used = 0;
            for (int rep = 0; rep < config.replications; ++rep) {
                const auto& slot = slots[static_cast<std::size_t>(rep) * n_methods + m];
                if (!slot.oos) {
                    ++row.failures;
                    continue;
                }
                oos += *slot.oos;
                ins += *slot.ins;
                ++used;
            }
            row.reps = used;
            if (used > 0) {
                row.oos_risk_mean = oos / used;
                row.insample_risk_mean = ins / used;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path,
                     const std::string& manifest) {
    CsvWriter out(path, manifest,
                  "sweep_var,value,method,oos_risk_mean,insample_risk_mean,oracle_risk,"
                  "reps,failures");
    for (const auto& r : rows) {
        out.add_row(r.sweep_var + ',' + std::to_string(r.value) + ',' + r.method + ',' +
                    fmt(r.oos_risk_mean) + ',' + fmt(r.insample_risk_mean) + ',' +
                    fmt(r.oracle_risk) + ',' + std::to_string(r.reps) + ',' +
                    std::to_string(r.failures));
    }
}

std::vector<LimitsRow> run_limits(const LimitsConfig& config) {
    if (config.gammas.empty() || config.taus.empty()) {
        throw InvalidInput("run_limits: empty gamma or tau list");
    }
    if (!(config.sigma2 > 0.0)) {
        throw InvalidInput("run_limits: sigma2 must be positive");
    }
    Eigen::VectorXd spectrum(1);
    spectrum(0) = config.sigma2;
    std::vector<LimitsRow> rows;
    for (const double gamma : config.gammas) {
        for (const double tau : config.taus) {
            LimitsRow row;
            row.gamma = gamma;
            row.tau = tau;
            row.m = stieltjes_m({spectrum, gamma, tau});
            row.c = c_tau_ratio(row.m, spectrum, gamma);
            if (gamma < 1.0) {
                row.rv = rv_limit(Regime::under, gamma);
            } else if (gamma > 1.0) {
                row.rv = rv_limit(Regime::over_identity, gamma);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_limits_csv(const std::vector<LimitsRow>& rows, const std::string& path,
                      const std::string& manifest) {
    CsvWriter out(path, manifest, "gamma,tau,m,c,rv_limit");
    for (const auto& r : rows) {
        out.add_row(fmt(r.gamma) + ',' + fmt(r.tau) + ',' + fmt(r.m) + ',' +
                    (r.c ? fmt(*r.c) : std::string()) + ',' +
                    (r.rv ? fmt(*r.rv) : std::string()));
    }
}

void write_backtest_outputs(const BacktestResult& result, const std::string& out_dir,
                            const std::string& manifest, const std::string& config_echo) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "weights");

    CsvWriter results((fs::path(out_dir) / "results.csv").string(), manifest,
                      "date,method,universe,realized_sd,failed");
    for (const auto& m : result.months) {
        results.add_row(m.first_test_date.to_string() + ',' + m.method + ',' +
                        std::to_string(m.universe) + ',' + fmt(m.realized_sd) + ',' +
                        (m.failed ? "1" : "0"));
    }
    for (const auto& [method, risk] : result.annualized) {
        results.add_comment("summary: method=" + method +
                            " annualized_risk=" + fmt(risk));
    }
    for (const auto& w : result.warnings) {
        results.add_comment("warning: " + w);
    }

    for (const auto& snap : result.snapshots) {
        const std::string name = snap.rebalance_date.to_string() + "_" + snap.method + ".csv";
        CsvWriter wout((fs::path(out_dir) / "weights" / name).string(), manifest,
                       "asset_id,weight");
        char buf[40];
        for (Eigen::Index i = 0; i < snap.weights.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", snap.weights(i));
            wout.add_row(snap.asset_ids[static_cast<std::size_t>(i)] + ',' + buf);
        }
    }

    std::ofstream man((fs::path(out_dir) / "manifest.txt").string());
    if (!man) {
        throw Error("cannot write manifest in '" + out_dir + "'");
    }
    man << manifest << '\n' << config_echo;
}

}  // namespace minvar
