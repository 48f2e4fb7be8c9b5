#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minvar/matrix_core.hpp"
#include "minvar/weights.hpp"

namespace minvar {

/// Trading days per year used for annualization.
inline constexpr double kTradingDaysPerYear = 252.0;

/// w^T a w.
double quadratic_form(const Eigen::VectorXd& w, const SymMatrix& a);
double quadratic_form(const WeightVector& w, const SymMatrix& a);

/// Variance of the weights under sigma divided by the minimum attainable
/// variance 1 / (1^T sigma^{-1} 1). Equals 1 exactly at the oracle weights
/// and is never below 1 for a fully invested portfolio.
double relative_variance(const WeightVector& w, const SymMatrix& sigma);

/// Same ratio with the normalizer 1^T sigma^{-1} 1 supplied by the caller,
/// for loops that evaluate many weight vectors against one sigma.
double relative_variance(const WeightVector& w, const SymMatrix& sigma,
                         double ones_sigma_inv_ones);

/// sqrt(rv) - 1, clamped to 0 when rv sits within rounding below 1.
/// Throws InvalidInput for rv below 1 - 1e-8.
double relative_risk(double rv);

/// Standard deviation of the demeaned daily series times sqrt(252).
/// The divisor is the series length, so an alternating +x/-x series has
/// volatility exactly x.
double annualized_risk(const std::vector<double>& daily_returns);

/// One evaluated portfolio, ready for CSV serialization. Fields that do not
/// apply (population quantities on real data, sample quantities for closed
/// forms) stay unset and serialize as empty cells.
struct RiskReport {
    std::string method;
    int n_assets = 0;
    int t_window = 0;
    std::optional<double> in_sample_variance;
    std::optional<double> oos_variance;
    std::optional<double> relative_variance;
    std::optional<double> relative_risk;
    std::optional<double> annualized;
};

std::string risk_report_csv_header();
std::string to_csv_row(const RiskReport& report);

}  // namespace minvar
