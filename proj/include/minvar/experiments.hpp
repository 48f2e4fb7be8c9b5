#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "minvar/backtest.hpp"
#include "minvar/estimators.hpp"
#include "minvar/factor_dgp.hpp"
#include "minvar/io.hpp"

namespace minvar {

/// Generator parameters for one population model; the realized model is a
/// deterministic function of these, so configs round-trip through files by
/// storing only this struct.
struct DgpConfig {
    Setting setting = Setting::setting1;
    int r = 1;
    double loading_lo = 0.5;
    double loading_hi = 1.5;
    double sigma2 = 1.0;
    SparseOmegaSpec omega;
    std::uint64_t seed = 1;
};

FactorModelSpec build_model(const DgpConfig& dgp, int n);

/// Runs `body(i)` for i in [0, n). With more than one thread the indices are
/// claimed from an atomic counter and results must be written to per-index
/// slots; the first exception wins and is rethrown after the pool drains.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

struct SimulateConfig {
    DgpConfig dgp;
    std::vector<int> n_list = {400};
    std::vector<int> t_list = {22};
    std::vector<EstimatorKind> methods = {EstimatorKind::ridgelet1,
                                          EstimatorKind::equal};
    int replications = 100;
    std::uint64_t seed = 1;  // replication k samples with seed + k
    Innovation dist = Innovation::gaussian;
    EstimatorOptions estimator;
    int threads = 1;
};

/// One (model size, window, method) cell of a simulation table.
struct SimulateRow {
    Setting setting = Setting::setting1;
    Innovation dist = Innovation::gaussian;
    int n = 0;
    int t = 0;
    std::string method;
    double rr_mean = 0.0;
    double rr_sd = 0.0;
    double rv_mean = 0.0;
    int reps = 0;  // successful replications entering the means
    std::uint64_t seed = 0;
    int failures = 0;
};

std::vector<SimulateRow> run_simulate(const SimulateConfig& config);
void write_simulate_csv(const std::vector<SimulateRow>& rows, const std::string& path,
                        const std::string& manifest);

struct SweepConfig {
    DgpConfig dgp;
    std::string sweep_var = "N";  // "N" or "T"
    std::vector<int> values;
    int fixed = 22;  // the dimension not swept
    std::vector<EstimatorKind> methods = {EstimatorKind::ridgelet1};
    int replications = 50;
    std::uint64_t seed = 1;
    Innovation dist = Innovation::gaussian;
    EstimatorOptions estimator;
    int threads = 1;
};

struct SweepRow {
    std::string sweep_var;
    int value = 0;
    std::string method;
    double oos_risk_mean = 0.0;       // sqrt of population variance, averaged
    double insample_risk_mean = 0.0;  // sqrt of sample variance, averaged
    double oracle_risk = 0.0;
    int reps = 0;
    int failures = 0;
};

std::vector<SweepRow> run_sweep(const SweepConfig& config);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path,
                     const std::string& manifest);

struct LimitsConfig {
    std::vector<double> gammas = {0.5, 2.0, 4.0};
    std::vector<double> taus = {kDefaultTau};
    double sigma2 = 1.0;
};

/// gamma == 1 sits between the regimes: the row still reports m and c but
/// carries no finite variance ratio limit.
struct LimitsRow {
    double gamma = 0.0;
    double tau = 0.0;
    double m = 0.0;
    std::optional<double> c;
    std::optional<double> rv;
};

std::vector<LimitsRow> run_limits(const LimitsConfig& config);
void write_limits_csv(const std::vector<LimitsRow>& rows, const std::string& path,
                      const std::string& manifest);

/// results.csv, per-method weight snapshots, and a manifest echoing the
/// configuration, all under out_dir. config_echo is written verbatim after
/// the manifest line, one key=value per line.
void write_backtest_outputs(const BacktestResult& result, const std::string& out_dir,
                            const std::string& manifest, const std::string& config_echo);

}  // namespace minvar
