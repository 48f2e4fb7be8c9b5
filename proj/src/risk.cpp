#include "minvar/risk.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace minvar {

double quadratic_form(const Eigen::VectorXd& w, const SymMatrix& a) {
    if (w.size() != a.dim()) {
        throw InvalidInput("quadratic_form: dimension mismatch");
    }
    return w.dot(a.mat() * w);
}

double quadratic_form(const WeightVector& w, const SymMatrix& a) {
    return quadratic_form(w.weights, a);
}

double relative_variance(const WeightVector& w, const SymMatrix& sigma) {
    const Eigen::VectorXd x = spd_solve(sigma, Eigen::VectorXd::Ones(sigma.dim()));
    const double normalizer = neumaier_sum(x);
    if (!(normalizer > 0.0)) {
        throw NumericalBreakdown("relative_variance: 1' sigma^{-1} 1 = " +
                                 std::to_string(normalizer));
    }
    return relative_variance(w, sigma, normalizer);
}

double relative_variance(const WeightVector& w, const SymMatrix& sigma,
                         double ones_sigma_inv_ones) {
    if (!(ones_sigma_inv_ones > 0.0)) {
        throw InvalidInput("relative_variance: normalizer must be positive");
    }
    return quadratic_form(w, sigma) * ones_sigma_inv_ones;
}

double relative_risk(double rv) {
    if (!(rv >= 1.0 - 1e-8)) {
        throw InvalidInput("relative_risk: relative variance " + std::to_string(rv) +
                           " is below 1");
    }
    return std::max(std::sqrt(rv) - 1.0, 0.0);
}

double annualized_risk(const std::vector<double>& daily_returns) {
    if (daily_returns.empty()) {
        throw InvalidInput("annualized_risk: empty series");
    }
    const double len = static_cast<double>(daily_returns.size());
    double mean = 0.0;
    for (const double x : daily_returns) {
        mean += x;
    }
    mean /= len;
    double ss = 0.0;
    for (const double x : daily_returns) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / len) * std::sqrt(kTradingDaysPerYear);
}

namespace {

std::string cell(const std::optional<double>& v) {
    if (!v) {
        return "";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", *v);
    return buf;
}

}  // namespace

std::string risk_report_csv_header() {
    return "method,n_assets,t_window,in_sample_variance,oos_variance,"
           "relative_variance,relative_risk,annualized_risk";
}

std::string to_csv_row(const RiskReport& report) {
    std::ostringstream out;
    out << report.method << ',' << report.n_assets << ',' << report.t_window << ','
        << cell(report.in_sample_variance) << ',' << cell(report.oos_variance) << ','
        << cell(report.relative_variance) << ',' << cell(report.relative_risk) << ','
        << cell(report.annualized);
    return out.str();
}

}  // namespace minvar
