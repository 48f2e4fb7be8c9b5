#pragma once

#include <string>
#include <vector>

#include "minvar/factor_dgp.hpp"
#include "minvar/panel.hpp"
#include "minvar/weights.hpp"

namespace minvar {

/// Every weight rule that can be requested by name from the command line,
/// a simulation config, or a backtest config. The first block runs on data
/// alone; the oracle-information rules at the end additionally need the true
/// model and exist only for simulation studies.
enum class EstimatorKind {
    plugin,
    ridgelet1,
    ridgelet2,
    ridgeless,
    exact_zvp,
    equal,
    ls,
    oracle,
    ridgelet2_ifs,
    factor_eliminating,
};

std::string to_string(EstimatorKind k);
EstimatorKind estimator_from_string(const std::string& name);
bool needs_true_model(EstimatorKind k);

/// Knobs shared by the estimators; only the rules that use a knob read it.
struct EstimatorOptions {
    double tau = kDefaultTau;
    bool demean = false;
    int r_max = 8;          // factor cap handed to the threshold estimator
    double c1 = 0.5;        // threshold constant when cross-validation is off
    bool c1_cv = false;
    std::vector<double> c1_grid;  // empty means the default grid
    int cv_folds = 5;
};

/// Runs one weight rule on a complete panel. `truth` may be null for the
/// data-only rules; the oracle-information rules throw InvalidInput without
/// it.
WeightVector estimate_weights(EstimatorKind kind, const ReturnPanel& panel,
                              const EstimatorOptions& opts,
                              const FactorModelSpec* truth = nullptr);

}  // namespace minvar
