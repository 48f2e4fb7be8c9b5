#pragma once

#include <Eigen/Dense>
#include <vector>

#include "minvar/matrix_core.hpp"
#include "minvar/panel.hpp"
#include "minvar/weights.hpp"

namespace minvar {

/// Sample covariance S_0 = R R^T / T with optional per-asset demeaning
/// applied first. The divisor is T either way.
SymMatrix sample_cov(const ReturnPanel& panel, bool demean = false);

/// s0 + tau * anchor. The workhorse regularizer behind both ridged rules.
SymMatrix ridge_augment(const SymMatrix& s0, double tau, const SymMatrix& anchor);

/// Factor count by the eigenvalue ratio method: the 1-based index i in
/// [1, r_max] maximizing eigenvalues[i-1] / eigenvalues[i]. Input sorted
/// descending and nonnegative. A zero in the denominator means an infinite
/// ratio, resolved to the first such index; ties go to the smallest index.
int eigenvalue_ratio_r(const Eigen::VectorXd& eigenvalues, int r_max);

/// Output of the principal-components-plus-thresholding estimator.
struct PoetResult {
    int r_hat = 0;
    Eigen::MatrixXd loadings_hat;  // N x r_hat, column i is sqrt(lambda_i) xi_i
    SymMatrix omega_hat;           // thresholded idiosyncratic covariance
    SymMatrix residual_cov;        // unthresholded residual covariance S_u
    double threshold_constant = 0.0;
    double eta_t = 0.0;            // rate factor entering every threshold
};

/// Pieces of the estimator that do not depend on the threshold constant.
/// Cross-validation reuses one of these per fold across the whole grid.
struct PoetIntermediate {
    Eigen::Index n_assets = 0;
    Eigen::Index t_obs = 0;
    int r_hat = 0;
    Eigen::MatrixXd loadings_hat;
    SymMatrix residual_cov;
    Eigen::MatrixXd theta;  // entrywise variance proxy of the residual covariances
    double eta_t = 0.0;
};

PoetIntermediate poet_prepare(const ReturnPanel& panel, int r_max, bool demean = false);
PoetResult poet_threshold(const PoetIntermediate& pre, double c1);

/// Principal components for the factor part, entry-adaptive hard
/// thresholding for the idiosyncratic part.
PoetResult poet(const ReturnPanel& panel, int r_max, double c1, bool demean = false);

/// Default threshold-constant grid: 21 points, geometric from 0.1 to 10.
std::vector<double> default_c1_grid();

/// Cross-validation trace: the held-out score of every grid point (infinity
/// for points whose estimation failed in some fold) and the winner.
struct PoetCvResult {
    double chosen_c1 = 0.0;
    std::vector<double> grid;
    std::vector<double> scores;
};

/// Threshold constant minimizing held-out portfolio variance over contiguous
/// time folds. Each fold trains on the complement, builds ridged weights from
/// the thresholded estimate, and scores mean squared portfolio return on the
/// held-out block. Ties resolve to the smallest constant.
PoetCvResult poet_cv_scores(const ReturnPanel& panel, const std::vector<double>& grid,
                            int folds, int r_max, double tau = kDefaultTau,
                            bool demean = false);
double poet_cv_c1(const ReturnPanel& panel, const std::vector<double>& grid, int folds,
                  int r_max, double tau = kDefaultTau, bool demean = false);

/// Linear shrinkage toward a scaled identity with the optimal intensity
/// estimated from the panel. Trace is preserved.
SymMatrix linear_shrinkage(const ReturnPanel& panel, bool demean = false);

/// Ensures positive definiteness: when the smallest eigenvalue is not
/// positive, adds (|lambda_min| + 1e-8) I. Positive definite inputs pass
/// through unchanged.
SymMatrix repair_pd(const SymMatrix& a);

}  // namespace minvar
