#include "minvar/panel.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

namespace minvar {

namespace {

const int kDaysInMonth[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    if (month == 2 && is_leap(year)) {
        return 29;
    }
    return kDaysInMonth[month - 1];
}

Date next_day(Date d) {
    ++d.day;
    if (d.day > days_in_month(d.year, d.month)) {
        d.day = 1;
        ++d.month;
        if (d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

// Sakamoto's method; 0 = Sunday.
int day_of_week(const Date& d) {
    static const int t[] = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
    int y = d.year;
    if (d.month < 3) {
        --y;
    }
    return (y + y / 4 - y / 100 + y / 400 + t[d.month - 1] + d.day) % 7;
}

bool is_weekend(const Date& d) {
    const int w = day_of_week(d);
    return w == 0 || w == 6;
}

}  // namespace

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::parse(const std::string& text) {
    Date d;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c", &d.year, &d.month, &d.day, &extra) != 3 ||
        text.size() != 10) {
        throw ParseError("bad date '" + text + "', expected YYYY-MM-DD");
    }
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
        throw ParseError("date '" + text + "' is out of range");
    }
    return d;
}

std::vector<Date> make_trading_dates(Date start, int count) {
    if (count < 0) {
        throw InvalidInput("make_trading_dates: negative count");
    }
    std::vector<Date> out;
    out.reserve(static_cast<std::size_t>(count));
    Date d = start;
    while (is_weekend(d)) {
        d = next_day(d);
    }
    while (static_cast<int>(out.size()) < count) {
        out.push_back(d);
        do {
            d = next_day(d);
        } while (is_weekend(d));
    }
    return out;
}

ReturnPanel::ReturnPanel(std::vector<std::string> asset_ids, std::vector<Date> dates,
                         Eigen::MatrixXd values)
    : asset_ids_(std::move(asset_ids)), dates_(std::move(dates)), values_(std::move(values)) {
    if (static_cast<Eigen::Index>(asset_ids_.size()) != values_.rows()) {
        throw InvalidInput("ReturnPanel: asset id count does not match row count");
    }
    if (static_cast<Eigen::Index>(dates_.size()) != values_.cols()) {
        throw InvalidInput("ReturnPanel: date count does not match column count");
    }
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i])) {
            throw InvalidInput("ReturnPanel: dates not strictly increasing at index " +
                               std::to_string(i));
        }
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : asset_ids_) {
        if (!seen.insert(id).second) {
            throw InvalidInput("ReturnPanel: duplicate asset id '" + id + "'");
        }
    }
}

ReturnPanel ReturnPanel::synthetic(Eigen::MatrixXd values, Date start) {
    const Eigen::Index n = values.rows();
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "A%04lld", static_cast<long long>(i + 1));
        ids.emplace_back(buf);
    }
    auto dates = make_trading_dates(start, static_cast<int>(values.cols()));
    return ReturnPanel(std::move(ids), std::move(dates), std::move(values));
}

ReturnPanel ReturnPanel::slice(const std::vector<Eigen::Index>& assets, Eigen::Index col_begin,
                               Eigen::Index col_end) const {
    if (col_begin < 0 || col_end > n_obs() || col_begin > col_end) {
        throw InvalidInput("ReturnPanel::slice: column range out of bounds");
    }
    std::vector<std::string> ids;
    ids.reserve(assets.size());
    Eigen::MatrixXd vals(static_cast<Eigen::Index>(assets.size()), col_end - col_begin);
    for (std::size_t k = 0; k < assets.size(); ++k) {
        const Eigen::Index i = assets[k];
        if (i < 0 || i >= n_assets()) {
            throw InvalidInput("ReturnPanel::slice: asset index out of bounds");
        }
        ids.push_back(asset_ids_[static_cast<std::size_t>(i)]);
        vals.row(static_cast<Eigen::Index>(k)) = values_.row(i).segment(col_begin, col_end - col_begin);
    }
    std::vector<Date> dates(dates_.begin() + col_begin, dates_.begin() + col_end);
    return ReturnPanel(std::move(ids), std::move(dates), std::move(vals));
}

Eigen::MatrixXd dense_returns(const ReturnPanel& panel, bool demean) {
    if (panel.has_missing()) {
        throw InvalidInput("dense_returns: panel has missing values");
    }
    Eigen::MatrixXd r = panel.values();
    if (demean && r.cols() > 0) {
        r.colwise() -= r.rowwise().mean();
    }
    return r;
}

}  // namespace minvar
