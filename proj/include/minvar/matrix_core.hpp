#pragma once

#include <Eigen/Dense>

#include "minvar/errors.hpp"

namespace minvar {

/// Relative eigenvalue cutoff used everywhere a numerical rank decision is made.
/// An eigenvalue is treated as zero when it is at most kRankTol times the
/// largest eigenvalue of the same matrix.
inline constexpr double kRankTol = 1e-10;

/// Dense symmetric matrix. Construction symmetrizes, so entries (i, j) and
/// (j, i) compare equal exactly, not merely up to rounding.
class SymMatrix {
public:
    SymMatrix() = default;

    /// Symmetrizes the input as (a + a^T) / 2. Square input required.
    explicit SymMatrix(Eigen::MatrixXd a);

    static SymMatrix identity(Eigen::Index n);
    static SymMatrix zero(Eigen::Index n);

    Eigen::Index dim() const { return m_.rows(); }
    const Eigen::MatrixXd& mat() const { return m_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

private:
    Eigen::MatrixXd m_;
};

/// Full spectral decomposition, eigenvalues sorted descending and
/// eigenvectors stored as orthonormal columns in matching order.
struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

/// Nonzero part of the spectrum of a positive semidefinite product matrix.
/// Eigenvalues below the rank cutoff are dropped, so `eigenvalues.size()`
/// is the numerical rank.
struct LowRankSpectrum {
    Eigen::VectorXd eigenvalues;   // descending, strictly above the rank cutoff
    Eigen::MatrixXd eigenvectors;  // one orthonormal column per kept eigenvalue
};

/// Spectral decomposition of a symmetric matrix.
/// Throws InvalidInput on non-finite entries.
EigenDecomposition sym_eigen(const SymMatrix& a);

/// Solves a x = b for symmetric positive definite a via Cholesky.
/// Throws NotPositiveDefinite when the factorization fails.
Eigen::VectorXd spd_solve(const SymMatrix& a, const Eigen::VectorXd& b);

/// Moore-Penrose pseudoinverse of a symmetric positive semidefinite matrix.
/// Eigenvalues at or below rank_tol times the largest are clamped to exactly
/// zero before inversion.
SymMatrix pseudoinverse(const SymMatrix& a, double rank_tol = kRankTol);

/// Inverse symmetric square root of a positive definite matrix.
/// Throws NotPositiveDefinite when the smallest eigenvalue is not positive.
SymMatrix inv_sqrt(const SymMatrix& a);

/// Symmetric square root of a positive semidefinite matrix. Small negative
/// eigenvalues from rounding are clamped to zero.
SymMatrix sqrt_psd(const SymMatrix& a);

/// Projector onto the orthogonal complement of the column span of `basis`.
/// `basis` must have orthonormal columns (checked to 1e-8); a matrix with
/// zero columns yields the identity.
SymMatrix null_projector(const Eigen::MatrixXd& basis);

/// Largest absolute eigenvalue.
double spectral_norm(const SymMatrix& a);

/// Eigenpairs of scale * r * r^T above the rank cutoff. When r has fewer
/// columns than rows the decomposition runs on the small Gram matrix
/// scale * r^T * r and maps the eigenvectors back, which keeps the cost at
/// O(N T^2) instead of O(N^3).
LowRankSpectrum gram_spectrum(const Eigen::MatrixXd& r, double scale,
                              double rank_tol = kRankTol);

/// Compensated (Neumaier) summation; the running error term is carried
/// separately so the result is faithful to the exact sum of the inputs.
double neumaier_sum(const double* x, Eigen::Index n);
double neumaier_sum(const Eigen::VectorXd& x);

}  // namespace minvar
