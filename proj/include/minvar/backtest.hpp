#pragma once

#include <map>
#include <string>
#include <vector>

#include "minvar/estimators.hpp"
#include "minvar/panel.hpp"

namespace minvar {

/// Which assets qualify for a training window.
enum class EligibilityRule {
    complete,      // no missing observation in the window
    min_fraction,  // at least min_fraction of the window observed
};

/// How missing training observations are repaired before estimation.
enum class FillPolicy {
    zero_fill,  // missing returns become 0
    mean_fill,  // missing returns become the asset's observed window mean
    drop_day,   // days with any missing eligible observation are dropped
};

EligibilityRule eligibility_from_string(const std::string& name);
FillPolicy fill_from_string(const std::string& name);
std::string to_string(EligibilityRule rule);
std::string to_string(FillPolicy policy);

struct BacktestConfig {
    int train_window = 22;
    std::vector<EstimatorKind> methods = {EstimatorKind::ridgelet1,
                                          EstimatorKind::equal};
    EligibilityRule eligibility = EligibilityRule::complete;
    double min_fraction = 0.75;
    FillPolicy fill = FillPolicy::zero_fill;
    EstimatorOptions estimator = [] {
        EstimatorOptions o;
        o.demean = true;  // historical panels are not mean zero by design
        o.c1_cv = true;
        return o;
    }();
};

/// One rebalance: estimate on [train_begin, train_end), hold fixed over
/// [test_begin, test_end). Indices address the panel's date axis and the
/// training block ends exactly where the test block starts.
struct RebalanceWindow {
    int train_begin = 0;
    int train_end = 0;
    int test_begin = 0;
    int test_end = 0;
};

struct Schedule {
    std::vector<RebalanceWindow> windows;
    std::vector<std::string> warnings;  // months skipped for lack of history
};

/// Calendar-month rebalancing: each month whose first trading day has at
/// least train_window prior trading days becomes a window trained on exactly
/// the train_window days before it. Earlier months are skipped with a
/// warning.
Schedule rebalance_schedule(const std::vector<Date>& dates, int train_window);

struct EligibilitySpec {
    EligibilityRule rule = EligibilityRule::complete;
    double min_fraction = 0.75;
};

/// Indices of assets whose observation count over [col_begin, col_end)
/// satisfies the rule. Throws NoEligibleAssets when none qualify.
std::vector<Eigen::Index> eligible_assets(const ReturnPanel& panel,
                                          Eigen::Index col_begin, Eigen::Index col_end,
                                          const EligibilitySpec& spec);

struct WeightSnapshot {
    Date rebalance_date;  // first out-of-sample day the weights apply to
    std::string method;
    std::vector<std::string> asset_ids;
    Eigen::VectorXd weights;
};

struct MonthRecord {
    Date first_test_date;
    std::string method;
    int universe = 0;
    double realized_sd = 0.0;  // daily, not annualized
    bool failed = false;
    std::string note;
};

struct BacktestResult {
    std::vector<Date> oos_dates;
    /// Daily out-of-sample portfolio returns per method, aligned with
    /// oos_dates; NaN where the month's estimation failed.
    std::map<std::string, std::vector<double>> oos_returns;
    /// Annualized volatility of each method's series, failed months excluded.
    std::map<std::string, double> annualized;
    std::vector<MonthRecord> months;
    std::vector<WeightSnapshot> snapshots;
    std::vector<std::string> warnings;
};

/// Runs the full monthly loop: schedule, eligibility, fill, estimation,
/// out-of-sample accounting. Missing out-of-sample returns contribute zero.
/// Deterministic: same panel and config give bit-identical results.
BacktestResult run_backtest(const ReturnPanel& panel, const BacktestConfig& config);

}  // namespace minvar
