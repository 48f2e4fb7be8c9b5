#pragma once

#include <Eigen/Dense>
#include <string>

#include "minvar/matrix_core.hpp"
#include "minvar/panel.hpp"

namespace minvar {

/// Ridge level used throughout when none is given. The ridge is a fixed
/// numerical regularizer, not a tuned hyperparameter.
inline constexpr double kDefaultTau = 1e-8;

/// Which rule produced a weight vector.
enum class Method {
    oracle,
    plugin,
    ridgelet1,
    ridgelet2,
    ridgeless,
    exact_zvp,
    equal,
    factor_eliminating,
};

std::string to_string(Method m);

/// Fully invested portfolio: weights sum to one by construction.
struct WeightVector {
    Eigen::VectorXd weights;
    Method method_tag = Method::plugin;
};

/// Minimum variance weights cov^{-1} 1 / (1^T cov^{-1} 1) for a positive
/// definite covariance. Serves as the oracle rule when cov is the population
/// covariance and as the plug-in rule when cov is a sample estimate.
WeightVector mvp_weight(const SymMatrix& cov, Method tag = Method::plugin);

/// Minimum variance weights from the identity-ridged sample covariance
/// S_0 + tau I.
WeightVector ridgelet1_weight(const ReturnPanel& panel, double tau = kDefaultTau,
                              bool demean = false);

/// Minimum variance weights from S_0 + tau omega_hat, where omega_hat is a
/// positive definite idiosyncratic covariance estimate (repair it first if
/// thresholding broke definiteness).
WeightVector ridgelet2_weight(const ReturnPanel& panel, const SymMatrix& omega_hat,
                              double tau = kDefaultTau, bool demean = false);

/// Pseudoinverse rule S_0^+ 1 / (1^T S_0^+ 1). The weights lie in the span
/// of the observed returns, so when S_0 is singular this is not an
/// interpolator and its in-sample variance stays strictly positive.
WeightVector ridgeless_weight(const ReturnPanel& panel, bool demean = false);

/// Projection rule P 1 / (1^T P 1) with P the projector onto the orthogonal
/// complement of the span of the returns. Exact in-sample interpolator with
/// minimum Euclidean norm. Requires 1 outside the span of the returns,
/// otherwise throws InfeasibleZvp.
WeightVector exact_zvp_weight(const ReturnPanel& panel, bool demean = false);

/// 1/n in every coordinate.
WeightVector equal_weight(Eigen::Index n);

/// Weights proportional to the projection of 1 onto the orthogonal
/// complement of the factor span V (orthonormal columns, possibly zero of
/// them). Throws InfeasibleProjection when 1 lies in that span.
WeightVector factor_eliminating_weight(const Eigen::MatrixXd& v);

}  // namespace minvar
