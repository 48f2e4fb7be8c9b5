#include "minvar/estimators.hpp"

#include "minvar/cov_estimators.hpp"

namespace minvar {

std::string to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::plugin: return "plugin";
        case EstimatorKind::ridgelet1: return "ridgelet1";
        case EstimatorKind::ridgelet2: return "ridgelet2";
        case EstimatorKind::ridgeless: return "ridgeless";
        case EstimatorKind::exact_zvp: return "exact_zvp";
        case EstimatorKind::equal: return "equal";
        case EstimatorKind::ls: return "ls";
        case EstimatorKind::oracle: return "oracle";
        case EstimatorKind::ridgelet2_ifs: return "ridgelet2_ifs";
        case EstimatorKind::factor_eliminating: return "factor_eliminating";
    }
    return "unknown";
}

EstimatorKind estimator_from_string(const std::string& name) {
    if (name == "plugin") return EstimatorKind::plugin;
    if (name == "ridgelet1") return EstimatorKind::ridgelet1;
    if (name == "ridgelet2") return EstimatorKind::ridgelet2;
    if (name == "ridgeless") return EstimatorKind::ridgeless;
    if (name == "exact_zvp") return EstimatorKind::exact_zvp;
    if (name == "equal" || name == "ew") return EstimatorKind::equal;
    if (name == "ls") return EstimatorKind::ls;
    if (name == "oracle") return EstimatorKind::oracle;
    if (name == "ridgelet2_ifs") return EstimatorKind::ridgelet2_ifs;
    if (name == "factor_eliminating") return EstimatorKind::factor_eliminating;
    throw InvalidInput("unknown method '" + name + "'");
}

bool needs_true_model(EstimatorKind k) {
    return k == EstimatorKind::oracle || k == EstimatorKind::ridgelet2_ifs ||
           k == EstimatorKind::factor_eliminating;
}

namespace {

WeightVector ridgelet2_estimated(const ReturnPanel& panel, const EstimatorOptions& opts) {
    double c1 = opts.c1;
    if (opts.c1_cv) {
        const std::vector<double> grid =
            opts.c1_grid.empty() ? default_c1_grid() : opts.c1_grid;
        c1 = poet_cv_c1(panel, grid, opts.cv_folds, opts.r_max, opts.tau, opts.demean);
    }
    const PoetResult fit = poet(panel, opts.r_max, c1, opts.demean);
    const SymMatrix omega = repair_pd(fit.omega_hat);
    return ridgelet2_weight(panel, omega, opts.tau, opts.demean);
}

}  // namespace

WeightVector estimate_weights(EstimatorKind kind, const ReturnPanel& panel,
                              const EstimatorOptions& opts,
                              const FactorModelSpec* truth) {
    if (needs_true_model(kind) && truth == nullptr) {
        throw InvalidInput("method '" + to_string(kind) +
                           "' needs the true model and cannot run on data alone");
    }
    switch (kind) {
        case EstimatorKind::plugin:
            return mvp_weight(sample_cov(panel, opts.demean), Method::plugin);
        case EstimatorKind::ridgelet1:
            return ridgelet1_weight(panel, opts.tau, opts.demean);
        case EstimatorKind::ridgelet2:
            return ridgelet2_estimated(panel, opts);
        case EstimatorKind::ridgeless:
            return ridgeless_weight(panel, opts.demean);
        case EstimatorKind::exact_zvp:
            return exact_zvp_weight(panel, opts.demean);
        case EstimatorKind::equal:
            return equal_weight(panel.n_assets());
        case EstimatorKind::ls:
            return mvp_weight(linear_shrinkage(panel, opts.demean), Method::plugin);
        case EstimatorKind::oracle:
            return mvp_weight(population_sigma(*truth), Method::oracle);
        case EstimatorKind::ridgelet2_ifs:
            return ridgelet2_weight(panel, truth->omega, opts.tau, opts.demean);
        case EstimatorKind::factor_eliminating: {
            Eigen::MatrixXd basis(truth->n_assets, 0);
            if (truth->r > 0) {
                basis = gram_spectrum(truth->loadings, 1.0).eigenvectors;
            }
            return factor_eliminating_weight(basis);
        }
    }
    throw InvalidInput("unknown method");
}

}  // namespace minvar
