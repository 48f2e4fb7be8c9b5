#include "minvar/matrix_core.hpp"

#include <cmath>
#include <string>

namespace minvar {

SymMatrix::SymMatrix(Eigen::MatrixXd a) {
    if (a.rows() != a.cols()) {
        throw InvalidInput("SymMatrix: input is " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + ", expected square");
    }
    // (x + y) / 2 evaluates identically for (i, j) and (j, i), so the stored
    // matrix is symmetric to the last bit.
    m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index n) {
    return SymMatrix(Eigen::MatrixXd::Identity(n, n));
}

SymMatrix SymMatrix::zero(Eigen::Index n) {
    return SymMatrix(Eigen::MatrixXd::Zero(n, n));
}

EigenDecomposition sym_eigen(const SymMatrix& a) {
    if (!a.mat().allFinite()) {
        throw InvalidInput("sym_eigen: matrix has non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.mat());
    if (solver.info() != Eigen::Success) {
        throw SolverFailed("sym_eigen: eigensolver failed to converge");
    }
    EigenDecomposition d;
    d.eigenvalues = solver.eigenvalues().reverse();
    d.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return d;
}

Eigen::VectorXd spd_solve(const SymMatrix& a, const Eigen::VectorXd& b) {
    if (a.dim() != b.size()) {
        throw InvalidInput("spd_solve: dimension mismatch");
    }
    if (!a.mat().allFinite() || !b.allFinite()) {
        throw InvalidInput("spd_solve: non-finite entries");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a.mat());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("spd_solve: Cholesky factorization failed");
    }
    return llt.solve(b);
}

SymMatrix pseudoinverse(const SymMatrix& a, double rank_tol) {
    const EigenDecomposition d = sym_eigen(a);
    const Eigen::Index n = a.dim();
    if (n == 0) {
        return a;
    }
    const double cutoff = rank_tol * std::max(d.eigenvalues(0), 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d.eigenvalues(i) > cutoff) {
            inv(i) = 1.0 / d.eigenvalues(i);
        }
    }
    return SymMatrix(d.eigenvectors * inv.asDiagonal() * d.eigenvectors.transpose());
}

SymMatrix inv_sqrt(const SymMatrix& a) {
    const EigenDecomposition d = sym_eigen(a);
    const Eigen::Index n = a.dim();
    if (n == 0) {
        return a;
    }
    if (d.eigenvalues(n - 1) <= 0.0) {
        throw NotPositiveDefinite("inv_sqrt: smallest eigenvalue is " +
                                  std::to_string(d.eigenvalues(n - 1)));
    }
    const Eigen::VectorXd s = d.eigenvalues.cwiseSqrt().cwiseInverse();
    return SymMatrix(d.eigenvectors * s.asDiagonal() * d.eigenvectors.transpose());
}

SymMatrix sqrt_psd(const SymMatrix& a) {
    const EigenDecomposition d = sym_eigen(a);
    const Eigen::VectorXd s = d.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return SymMatrix(d.eigenvectors * s.asDiagonal() * d.eigenvectors.transpose());
}

SymMatrix null_projector(const Eigen::MatrixXd& basis) {
    const Eigen::Index n = basis.rows();
    const Eigen::Index k = basis.cols();
    if (k == 0) {
        return SymMatrix::identity(n);
    }
    if (!basis.allFinite()) {
        throw InvalidInput("null_projector: non-finite entries");
    }
    const Eigen::MatrixXd gram = basis.transpose() * basis;
    const double defect =
        (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    if (defect > 1e-8) {
        throw InvalidInput("null_projector: columns not orthonormal, defect " +
                           std::to_string(defect));
    }
    return SymMatrix(Eigen::MatrixXd::Identity(n, n) - basis * basis.transpose());
}

double spectral_norm(const SymMatrix& a) {
    if (a.dim() == 0) {
        return 0.0;
    }
    const EigenDecomposition d = sym_eigen(a);
    return std::max(std::abs(d.eigenvalues(0)), std::abs(d.eigenvalues(a.dim() - 1)));
}

LowRankSpectrum gram_spectrum(const Eigen::MatrixXd& r, double scale, double rank_tol) {
    if (!r.allFinite()) {
        throw InvalidInput("gram_spectrum: non-finite entries");
    }
    if (scale <= 0.0) {
        throw InvalidInput("gram_spectrum: scale must be positive");
    }
    const Eigen::Index n = r.rows();
    const Eigen::Index t = r.cols();
    LowRankSpectrum out;
    if (n <= t) {
        const EigenDecomposition d = sym_eigen(SymMatrix(scale * (r * r.transpose())));
        const double cutoff = n > 0 ? rank_tol * std::max(d.eigenvalues(0), 0.0) : 0.0;
        Eigen::Index rank = 0;
        while (rank < n && d.eigenvalues(rank) > cutoff) {
            ++rank;
        }
        out.eigenvalues = d.eigenvalues.head(rank);
        out.eigenvectors = d.eigenvectors.leftCols(rank);
        return out;
    }
    // Companion route: scale * r^T r shares its nonzero spectrum with
    // scale * r r^T, and u = r v * sqrt(scale / lambda) maps eigenvectors back.
    const EigenDecomposition d = sym_eigen(SymMatrix(scale * (r.transpose() * r)));
    const double cutoff = t > 0 ? rank_tol * std::max(d.eigenvalues(0), 0.0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < t && d.eigenvalues(rank) > cutoff) {
        ++rank;
    }
    out.eigenvalues = d.eigenvalues.head(rank);
    out.eigenvectors.resize(n, rank);
    if (rank > 0) {
        out.eigenvectors = r * d.eigenvectors.leftCols(rank);
        for (Eigen::Index i = 0; i < rank; ++i) {
            out.eigenvectors.col(i) *= std::sqrt(scale / out.eigenvalues(i));
        }
    }
    return out;
}

double neumaier_sum(const double* x, Eigen::Index n) {
    double sum = 0.0;
    double comp = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = sum + x[i];
        if (std::abs(sum) >= std::abs(x[i])) {
            comp += (sum - t) + x[i];
        } else {
            comp += (x[i] - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

double neumaier_sum(const Eigen::VectorXd& x) {
    return neumaier_sum(x.data(), x.size());
}

}  // namespace minvar
