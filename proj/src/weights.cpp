#include "minvar/weights.hpp"

#include <cmath>
#include <utility>

#include "minvar/cov_estimators.hpp"

namespace minvar {

namespace {

// Measures the true sum with compensated summation and absorbs the residual
// into the smallest-magnitude coordinate, where the adjustment rounds least.
void pin_sum_to_one(Eigen::VectorXd& w) {
    const double s = neumaier_sum(w);
    Eigen::Index j = 0;
    w.cwiseAbs().minCoeff(&j);
    w(j) -= s - 1.0;
}

WeightVector normalized(Eigen::VectorXd x, double denom, Method tag) {
    Eigen::VectorXd w = x / denom;
    pin_sum_to_one(w);
    return WeightVector{std::move(w), tag};
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::oracle: return "oracle";
        case Method::plugin: return "plugin";
        case Method::ridgelet1: return "ridgelet1";
        case Method::ridgelet2: return "ridgelet2";
        case Method::ridgeless: return "ridgeless";
        case Method::exact_zvp: return "exact_zvp";
        case Method::equal: return "equal";
        case Method::factor_eliminating: return "factor_eliminating";
    }
    return "unknown";
}

WeightVector mvp_weight(const SymMatrix& cov, Method tag) {
    if (cov.dim() == 0) {
        throw InvalidInput("mvp_weight: empty covariance");
    }
    Eigen::VectorXd x = spd_solve(cov, Eigen::VectorXd::Ones(cov.dim()));
    const double s = neumaier_sum(x);
    if (!(s > 0.0)) {
        throw NumericalBreakdown("mvp_weight: normalizer 1' cov^{-1} 1 = " +
                                 std::to_string(s));
    }
    return normalized(std::move(x), s, tag);
}

WeightVector ridgelet1_weight(const ReturnPanel& panel, double tau, bool demean) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw InvalidInput("ridgelet1_weight: tau must be positive and finite");
    }
    const SymMatrix s_tau = ridge_augment(sample_cov(panel, demean), tau,
                                          SymMatrix::identity(panel.n_assets()));
    return WeightVector{mvp_weight(s_tau, Method::ridgelet1).weights, Method::ridgelet1};
}

WeightVector ridgelet2_weight(const ReturnPanel& panel, const SymMatrix& omega_hat,
                              double tau, bool demean) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw InvalidInput("ridgelet2_weight: tau must be positive and finite");
    }
    if (omega_hat.dim() != panel.n_assets()) {
        throw InvalidInput("ridgelet2_weight: anchor dimension does not match panel");
    }
    const SymMatrix s_tau = ridge_augment(sample_cov(panel, demean), tau, omega_hat);
    return WeightVector{mvp_weight(s_tau, Method::ridgelet2).weights, Method::ridgelet2};
}

WeightVector ridgeless_weight(const ReturnPanel& panel, bool demean) {
    const Eigen::MatrixXd r = dense_returns(panel, demean);
    if (r.rows() == 0 || r.cols() == 0) {
        throw InvalidInput("ridgeless_weight: empty panel");
    }
    const LowRankSpectrum sp = gram_spectrum(r, 1.0 / static_cast<double>(r.cols()));
    const Eigen::VectorXd eta =
        sp.eigenvectors.transpose() * Eigen::VectorXd::Ones(r.rows());
    const Eigen::VectorXd lam_inv_eta = eta.cwiseQuotient(sp.eigenvalues);
    const Eigen::VectorXd terms = eta.cwiseProduct(lam_inv_eta);
    const double s = neumaier_sum(terms);
    if (std::abs(s) < 1e-14) {
        throw NumericalBreakdown("ridgeless_weight: normalizer 1' S0^+ 1 = " +
                                 std::to_string(s));
    }
    Eigen::VectorXd x = sp.eigenvectors * lam_inv_eta;
    return normalized(std::move(x), s, Method::ridgeless);
}

WeightVector exact_zvp_weight(const ReturnPanel& panel, bool demean) {
    const Eigen::MatrixXd r = dense_returns(panel, demean);
    const Eigen::Index n = r.rows();
    if (n == 0 || r.cols() == 0) {
        throw InvalidInput("exact_zvp_weight: empty panel");
    }
    const LowRankSpectrum sp = gram_spectrum(r, 1.0 / static_cast<double>(r.cols()));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd p = ones - sp.eigenvectors * (sp.eigenvectors.transpose() * ones);
    if (!(p.norm() / std::sqrt(static_cast<double>(n)) > 1e-8)) {
        throw InfeasibleZvp(
            "exact_zvp_weight: ones vector lies in the span of the returns");
    }
    const double s = neumaier_sum(p);
    if (!(s > 0.0)) {
        throw NumericalBreakdown("exact_zvp_weight: normalizer 1' P 1 = " +
                                 std::to_string(s));
    }
    return normalized(p, s, Method::exact_zvp);
}

WeightVector equal_weight(Eigen::Index n) {
    if (n < 1) {
        throw InvalidInput("equal_weight: need at least one asset");
    }
    return WeightVector{Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)),
                        Method::equal};
}

WeightVector factor_eliminating_weight(const Eigen::MatrixXd& v) {
    const Eigen::Index n = v.rows();
    if (n == 0) {
        throw InvalidInput("factor_eliminating_weight: empty basis");
    }
    const SymMatrix proj = null_projector(v);
    const Eigen::VectorXd p = proj.mat() * Eigen::VectorXd::Ones(n);
    if (!(p.norm() / std::sqrt(static_cast<double>(n)) > 1e-8)) {
        throw InfeasibleProjection(
            "factor_eliminating_weight: ones vector lies in the factor span");
    }
    const double s = neumaier_sum(p);
    if (!(s > 0.0)) {
        throw NumericalBreakdown("factor_eliminating_weight: normalizer 1' P 1 = " +
                                 std::to_string(s));
    }
    return normalized(p, s, Method::factor_eliminating);
}

}  // namespace minvar
