#include "minvar/backtest.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "minvar/risk.hpp"

namespace minvar {

EligibilityRule eligibility_from_string(const std::string& name) {
    if (name == "complete") {
        return EligibilityRule::complete;
    }
    if (name == "min_fraction") {
        return EligibilityRule::min_fraction;
    }
    throw InvalidInput("unknown eligibility rule '" + name + "'");
}

FillPolicy fill_from_string(const std::string& name) {
    if (name == "zero_fill") {
        return FillPolicy::zero_fill;
    }
    if (name == "mean_fill") {
        return FillPolicy::mean_fill;
    }
    if (name == "drop_day") {
        return FillPolicy::drop_day;
    }
    throw InvalidInput("unknown fill policy '" + name + "'");
}

std::string to_string(EligibilityRule rule) {
    return rule == EligibilityRule::complete ? "complete" : "min_fraction";
}

std::string to_string(FillPolicy policy) {
    switch (policy) {
        case FillPolicy::zero_fill: return "zero_fill";
        case FillPolicy::mean_fill: return "mean_fill";
        case FillPolicy::drop_day: return "drop_day";
    }
    return "unknown";
}

Schedule rebalance_schedule(const std::vector<Date>& dates, int train_window) {
    if (train_window < 2) {
        throw InvalidInput("rebalance_schedule: train_window must be at least 2");
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw InvalidInput("rebalance_schedule: dates not strictly increasing");
        }
    }
    Schedule out;
    const int n = static_cast<int>(dates.size());
    int month_start = 0;
    for (int i = 1; i <= n; ++i) {
        const bool boundary = i == n || dates[static_cast<std::size_t>(i)].year !=
                                            dates[static_cast<std::size_t>(month_start)].year ||
                              dates[static_cast<std::size_t>(i)].month !=
                                  dates[static_cast<std::size_t>(month_start)].month;
        if (!boundary) {
            continue;
        }
        if (month_start >= train_window) {
            out.windows.push_back(RebalanceWindow{month_start - train_window, month_start,
                                                  month_start, i});
        } else {
            const Date& d = dates[static_cast<std::size_t>(month_start)];
            char buf[64];
            std::snprintf(buf, sizeof(buf), "skipping %04d-%02d: %d days of history, need %d",
                          d.year, d.month, month_start, train_window);
            out.warnings.emplace_back(buf);
        }
        month_start = i;
    }
    return out;
}

std::vector<Eigen::Index> eligible_assets(const ReturnPanel& panel, Eigen::Index col_begin,
                                          Eigen::Index col_end,
                                          const EligibilitySpec& spec) {
    if (col_begin < 0 || col_end > panel.n_obs() || col_begin >= col_end) {
        throw InvalidInput("eligible_assets: bad column range");
    }
    if (spec.rule == EligibilityRule::min_fraction &&
        (!(spec.min_fraction > 0.0) || !(spec.min_fraction <= 1.0))) {
        throw InvalidInput("eligible_assets: min_fraction must lie in (0, 1]");
    }
    const Eigen::Index len = col_end - col_begin;
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < panel.n_assets(); ++i) {
        Eigen::Index observed = 0;
        for (Eigen::Index j = col_begin; j < col_end; ++j) {
            if (!ReturnPanel::is_missing(panel.values()(i, j))) {
                ++observed;
            }
        }
        const bool ok = spec.rule == EligibilityRule::complete
                            ? observed == len
                            : static_cast<double>(observed) >=
                                  spec.min_fraction * static_cast<double>(len);
        if (ok) {
            out.push_back(i);
        }
    }
    if (out.empty()) {
        throw NoEligibleAssets("eligible_assets: no asset passes the rule");
    }
    return out;
}

namespace {

// Daily standard deviation with the series-length divisor, matching the
// annualization convention.
double daily_sd(const std::vector<double>& xs) {
    if (xs.empty()) {
        return 0.0;
    }
    double mean = 0.0;
    for (const double x : xs) {
        mean += x;
    }
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (const double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

// Applies the fill policy to a training slice; may shorten the time axis
// under drop_day.
ReturnPanel fill_training(const ReturnPanel& slice, FillPolicy policy) {
    Eigen::MatrixXd vals = slice.values();
    const Eigen::Index n = vals.rows();
    const Eigen::Index t = vals.cols();
    switch (policy) {
        case FillPolicy::zero_fill:
            for (Eigen::Index j = 0; j < t; ++j) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (ReturnPanel::is_missing(vals(i, j))) {
                        vals(i, j) = 0.0;
                    }
                }
            }
            return ReturnPanel(slice.asset_ids(), slice.dates(), std::move(vals));
        case FillPolicy::mean_fill:
            for (Eigen::Index i = 0; i < n; ++i) {
                double sum = 0.0;
                Eigen::Index count = 0;
                for (Eigen::Index j = 0; j < t; ++j) {
                    if (!ReturnPanel::is_missing(vals(i, j))) {
                        sum += vals(i, j);
                        ++count;
                    }
                }
                const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
                for (Eigen::Index j = 0; j < t; ++j) {
                    if (ReturnPanel::is_missing(vals(i, j))) {
                        vals(i, j) = mean;
                    }
                }
            }
            return ReturnPanel(slice.asset_ids(), slice.dates(), std::move(vals));
        case FillPolicy::drop_day: {
            std::vector<Eigen::Index> keep;
            for (Eigen::Index j = 0; j < t; ++j) {
                if (!vals.col(j).hasNaN()) {
                    keep.push_back(j);
                }
            }
            Eigen::MatrixXd kept(n, static_cast<Eigen::Index>(keep.size()));
            std::vector<Date> dates;
            dates.reserve(keep.size());
            for (std::size_t k = 0; k < keep.size(); ++k) {
                kept.col(static_cast<Eigen::Index>(k)) = vals.col(keep[k]);
                dates.push_back(slice.dates()[static_cast<std::size_t>(keep[k])]);
            }
            return ReturnPanel(slice.asset_ids(), std::move(dates), std::move(kept));
        }
    }
    throw InvalidInput("fill_training: unknown policy");
}

}  // namespace

BacktestResult run_backtest(const ReturnPanel& panel, const BacktestConfig& config) {
    if (config.methods.empty()) {
        throw InvalidInput("run_backtest: no methods requested");
    }
    for (const EstimatorKind k : config.methods) {
        if (needs_true_model(k)) {
            throw InvalidInput("run_backtest: method '" + to_string(k) +
                               "' needs the true model and cannot be backtested");
        }
    }
    const EligibilitySpec elig_spec{config.eligibility, config.min_fraction};
    if (config.eligibility == EligibilityRule::min_fraction &&
        (!(config.min_fraction > 0.0) || !(config.min_fraction <= 1.0))) {
        throw InvalidInput("run_backtest: min_fraction must lie in (0, 1]");
    }

    Schedule schedule = rebalance_schedule(panel.dates(), config.train_window);

    BacktestResult result;
    result.warnings = std::move(schedule.warnings);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const EstimatorKind k : config.methods) {
        result.oos_returns[to_string(k)] = {};
    }

    for (const RebalanceWindow& w : schedule.windows) {
        const Date month_date = panel.dates()[static_cast<std::size_t>(w.test_begin)];
        for (Eigen::Index j = w.test_begin; j < w.test_end; ++j) {
            result.oos_dates.push_back(panel.dates()[static_cast<std::size_t>(j)]);
        }
        const Eigen::Index days = w.test_end - w.test_begin;

        std::vector<Eigen::Index> elig;
        try {
            elig = eligible_assets(panel, w.train_begin, w.train_end, elig_spec);
        } catch (const NoEligibleAssets& e) {
            result.warnings.push_back(month_date.to_string() + ": " + e.what());
            for (const EstimatorKind k : config.methods) {
                auto& series = result.oos_returns[to_string(k)];
                series.insert(series.end(), static_cast<std::size_t>(days), nan);
                result.months.push_back(
                    MonthRecord{month_date, to_string(k), 0, 0.0, true, e.what()});
            }
            continue;
        }

        ReturnPanel train =
            fill_training(panel.slice(elig, w.train_begin, w.train_end), config.fill);
        const bool train_usable = train.n_obs() >= 2;

        for (const EstimatorKind k : config.methods) {
            const std::string name = to_string(k);
            auto& series = result.oos_returns[name];
            MonthRecord record;
            record.first_test_date = month_date;
            record.method = name;
            record.universe = static_cast<int>(elig.size());

            WeightVector weights;
            bool ok = train_usable;
            std::string note = train_usable ? "" : "training window empty after fill";
            if (train_usable) {
                try {
                    weights = estimate_weights(k, train, config.estimator, nullptr);
                } catch (const Error& e) {
                    ok = false;
                    note = e.what();
                }
            }

            if (!ok) {
                series.insert(series.end(), static_cast<std::size_t>(days), nan);
                record.failed = true;
                record.note = note;
                result.months.push_back(std::move(record));
                result.warnings.push_back(month_date.to_string() + " " + name + ": " + note);
                continue;
            }

            std::vector<double> month_returns;
            month_returns.reserve(static_cast<std::size_t>(days));
            for (Eigen::Index j = w.test_begin; j < w.test_end; ++j) {
                double ret = 0.0;
                for (std::size_t a = 0; a < elig.size(); ++a) {
                    const double v = panel.values()(elig[a], j);
                    if (!ReturnPanel::is_missing(v)) {
                        ret += weights.weights(static_cast<Eigen::Index>(a)) * v;
                    }
                }
                month_returns.push_back(ret);
                series.push_back(ret);
            }
            record.realized_sd = daily_sd(month_returns);
            result.months.push_back(std::move(record));

            WeightSnapshot snap;
            snap.rebalance_date = month_date;
            snap.method = name;
            snap.asset_ids = train.asset_ids();
            snap.weights = weights.weights;
            result.snapshots.push_back(std::move(snap));
        }
    }

    for (const auto& [name, series] : result.oos_returns) {
        std::vector<double> valid;
        valid.reserve(series.size());
        for (const double x : series) {
            if (!std::isnan(x)) {
                valid.push_back(x);
            }
        }
        if (!valid.empty()) {
            result.annualized[name] = annualized_risk(valid);
        }
    }
    return result;
}

}  // namespace minvar
