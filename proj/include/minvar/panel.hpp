#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <compare>
#include <string>
#include <vector>

#include "minvar/errors.hpp"

namespace minvar {

/// Calendar date. Only ordering and month grouping are needed, so no
/// timezone or clock machinery.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    /// "YYYY-MM-DD"
    std::string to_string() const;

    /// Parses "YYYY-MM-DD". Throws ParseError on anything else.
    static Date parse(const std::string& text);
};

/// Weekday sequence starting at `start` (moved forward to a weekday if it
/// falls on a weekend). Used to give simulated panels a usable calendar.
std::vector<Date> make_trading_dates(Date start, int count);

/// Asset-by-time return panel. Rows are assets, columns are observation
/// dates in strictly increasing order. Missing observations are stored as
/// NaN and must be handled by the caller before any estimation.
class ReturnPanel {
public:
    ReturnPanel() = default;
    ReturnPanel(std::vector<std::string> asset_ids, std::vector<Date> dates,
                Eigen::MatrixXd values);

    /// Wraps a complete matrix with generated asset ids and weekday dates.
    static ReturnPanel synthetic(Eigen::MatrixXd values, Date start = {2000, 1, 3});

    Eigen::Index n_assets() const { return values_.rows(); }
    Eigen::Index n_obs() const { return values_.cols(); }

    const std::vector<std::string>& asset_ids() const { return asset_ids_; }
    const std::vector<Date>& dates() const { return dates_; }
    const Eigen::MatrixXd& values() const { return values_; }

    bool has_missing() const { return !values_.allFinite(); }

    static bool is_missing(double v) { return std::isnan(v); }

    /// Panel restricted to the given asset rows and the column range
    /// [col_begin, col_end).
    ReturnPanel slice(const std::vector<Eigen::Index>& assets, Eigen::Index col_begin,
                      Eigen::Index col_end) const;

private:
    std::vector<std::string> asset_ids_;
    std::vector<Date> dates_;
    Eigen::MatrixXd values_;
};

/// Returns matrix of a complete panel, optionally demeaned per asset.
/// Throws InvalidInput when the panel still contains missing values.
Eigen::MatrixXd dense_returns(const ReturnPanel& panel, bool demean);

}  // namespace minvar
