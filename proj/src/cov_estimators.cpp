#include "minvar/cov_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace minvar {

SymMatrix sample_cov(const ReturnPanel& panel, bool demean) {
    const Eigen::MatrixXd r = dense_returns(panel, demean);
    if (r.cols() < 1) {
        throw InvalidInput("sample_cov: panel has no observations");
    }
    return SymMatrix(r * r.transpose() / static_cast<double>(r.cols()));
}

SymMatrix ridge_augment(const SymMatrix& s0, double tau, const SymMatrix& anchor) {
    if (s0.dim() != anchor.dim()) {
        throw InvalidInput("ridge_augment: anchor dimension mismatch");
    }
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw InvalidInput("ridge_augment: tau must be nonnegative and finite");
    }
    return SymMatrix(s0.mat() + tau * anchor.mat());
}

int eigenvalue_ratio_r(const Eigen::VectorXd& eigenvalues, int r_max) {
    const Eigen::Index n = eigenvalues.size();
    if (r_max < 1 || r_max > n - 1) {
        throw InvalidInput("eigenvalue_ratio_r: r_max must lie in [1, len - 1]");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(eigenvalues(i) >= 0.0)) {
            throw InvalidInput("eigenvalue_ratio_r: eigenvalues must be nonnegative");
        }
        if (i > 0 && eigenvalues(i) > eigenvalues(i - 1)) {
            throw InvalidInput("eigenvalue_ratio_r: eigenvalues must be descending");
        }
    }
    int best = 1;
    double best_ratio = -1.0;
    for (int i = 1; i <= r_max; ++i) {
        const double denom = eigenvalues(i);
        if (denom == 0.0) {
            // Infinite ratio beats everything later; ties resolve small.
            return i;
        }
        const double ratio = eigenvalues(i - 1) / denom;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = i;
        }
    }
    return best;
}

PoetIntermediate poet_prepare(const ReturnPanel& panel, int r_max, bool demean) {
    const Eigen::MatrixXd r = dense_returns(panel, demean);
    const Eigen::Index n = r.rows();
    const Eigen::Index t = r.cols();
    if (n < 2 || t < 3) {
        throw InvalidInput("poet: need at least 2 assets and 3 observations");
    }
    if (r_max < 1) {
        throw InvalidInput("poet: r_max must be at least 1");
    }
    const Eigen::Index len = std::min(n, t);
    const LowRankSpectrum sp = gram_spectrum(r, 1.0 / static_cast<double>(t));

    Eigen::VectorXd evals = Eigen::VectorXd::Zero(len);
    evals.head(sp.eigenvalues.size()) = sp.eigenvalues;
    const int r_cap = std::min<int>(r_max, static_cast<int>(len) - 1);
    const int r_hat = eigenvalue_ratio_r(evals, r_cap);
    if (r_hat >= n) {
        throw DegenerateFactorCount("poet: estimated factor count leaves no residual");
    }

    PoetIntermediate pre;
    pre.n_assets = n;
    pre.t_obs = t;
    pre.r_hat = r_hat;

    const Eigen::MatrixXd u = sp.eigenvectors.leftCols(r_hat);
    pre.loadings_hat.resize(n, r_hat);
    for (int i = 0; i < r_hat; ++i) {
        pre.loadings_hat.col(i) = std::sqrt(evals(i)) * u.col(i);
    }

    const Eigen::MatrixXd resid = r - u * (u.transpose() * r);
    pre.residual_cov = SymMatrix(resid * resid.transpose() / static_cast<double>(t));

    // theta_ij = mean_t (u_it u_jt - sigma_ij)^2, expanded so one Gram product
    // covers the whole matrix. Rounding can push exact zeros slightly
    // negative, hence the clamp; theta is a variance.
    const Eigen::MatrixXd usq = resid.cwiseProduct(resid);
    const Eigen::MatrixXd second = usq * usq.transpose() / static_cast<double>(t);
    pre.theta = (second - pre.residual_cov.mat().cwiseProduct(pre.residual_cov.mat()))
                    .cwiseMax(0.0);

    const double rr = static_cast<double>(r_hat);
    const double logn = std::log(static_cast<double>(n));
    pre.eta_t = (rr * std::sqrt(logn) + rr * rr) / std::sqrt(static_cast<double>(t)) +
                rr * rr * rr / std::sqrt(static_cast<double>(n)) +
                std::sqrt(logn / static_cast<double>(t));
    return pre;
}

PoetResult poet_threshold(const PoetIntermediate& pre, double c1) {
    if (!(c1 >= 0.0) || !std::isfinite(c1)) {
        throw InvalidInput("poet: threshold constant must be nonnegative and finite");
    }
    Eigen::MatrixXd om = pre.residual_cov.mat();
    const Eigen::Index n = om.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double cut = c1 * std::sqrt(pre.theta(i, j)) * pre.eta_t;
            if (std::abs(om(i, j)) < cut) {
                om(i, j) = 0.0;
                om(j, i) = 0.0;
            }
        }
    }
    PoetResult out;
    out.r_hat = pre.r_hat;
    out.loadings_hat = pre.loadings_hat;
    out.omega_hat = SymMatrix(std::move(om));
    out.residual_cov = pre.residual_cov;
    out.threshold_constant = c1;
    out.eta_t = pre.eta_t;
    return out;
}

PoetResult poet(const ReturnPanel& panel, int r_max, double c1, bool demean) {
    return poet_threshold(poet_prepare(panel, r_max, demean), c1);
}

std::vector<double> default_c1_grid() {
    std::vector<double> grid(21);
    for (int k = 0; k < 21; ++k) {
        grid[static_cast<std::size_t>(k)] =
            0.1 * std::pow(100.0, static_cast<double>(k) / 20.0);
    }
    return grid;
}

PoetCvResult poet_cv_scores(const ReturnPanel& panel, const std::vector<double>& grid,
                            int folds, int r_max, double tau, bool demean) {
    if (grid.empty()) {
        throw InvalidInput("poet_cv_c1: empty grid");
    }
    if (folds < 2) {
        throw InvalidInput("poet_cv_c1: need at least 2 folds");
    }
    const Eigen::Index t = panel.n_obs();
    if (t < folds) {
        throw InvalidInput("poet_cv_c1: more folds than observations");
    }
    const Eigen::MatrixXd full = dense_returns(panel, false);
    const Eigen::Index n = panel.n_assets();

    // Contiguous near-equal time blocks; the first t % folds blocks get the
    // extra observation.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
    const Eigen::Index base = t / folds;
    Eigen::Index rem = t % folds;
    Eigen::Index pos = 0;
    for (int f = 0; f < folds; ++f) {
        const Eigen::Index len = base + (rem > 0 ? 1 : 0);
        if (rem > 0) {
            --rem;
        }
        blocks.emplace_back(pos, pos + len);
        pos += len;
    }
    for (const auto& [b, e] : blocks) {
        if (t - (e - b) < 3) {
            throw InvalidInput("poet_cv_c1: training folds too short");
        }
    }

    std::vector<Eigen::Index> all_assets(static_cast<std::size_t>(n));
    std::iota(all_assets.begin(), all_assets.end(), 0);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> score(grid.size(), 0.0);
    std::vector<bool> dead(grid.size(), false);

    for (const auto& [b, e] : blocks) {
        // Training panel: everything outside [b, e). Dates stay increasing
        // because column order is preserved.
        const Eigen::Index keep = t - (e - b);
        Eigen::MatrixXd train_vals(n, keep);
        std::vector<Date> train_dates;
        train_dates.reserve(static_cast<std::size_t>(keep));
        Eigen::Index c = 0;
        for (Eigen::Index j = 0; j < t; ++j) {
            if (j >= b && j < e) {
                continue;
            }
            train_vals.col(c++) = full.col(j);
            train_dates.push_back(panel.dates()[static_cast<std::size_t>(j)]);
        }
        const ReturnPanel train(panel.asset_ids(), std::move(train_dates),
                                std::move(train_vals));
        const PoetIntermediate pre = poet_prepare(train, r_max, demean);

        for (std::size_t g = 0; g < grid.size(); ++g) {
            if (dead[g]) {
                continue;
            }
            try {
                const SymMatrix om = repair_pd(poet_threshold(pre, grid[g]).omega_hat);
                const WeightVector w = ridgelet2_weight(train, om, tau, demean);
                double ss = 0.0;
                for (Eigen::Index j = b; j < e; ++j) {
                    const double v = w.weights.dot(full.col(j));
                    ss += v * v;
                }
                score[g] += ss / static_cast<double>(e - b) /
                            static_cast<double>(folds);
            } catch (const Error&) {
                dead[g] = true;
            }
        }
    }

    PoetCvResult out;
    out.grid = grid;
    out.scores = score;
    double best_score = inf;
    bool found = false;
    // Scan by ascending constant so exact score ties resolve to the smaller.
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b2) { return grid[a] < grid[b2]; });
    for (const std::size_t g : order) {
        if (dead[g]) {
            out.scores[g] = inf;
            continue;
        }
        if (!found || score[g] < best_score) {
            best_score = score[g];
            out.chosen_c1 = grid[g];
            found = true;
        }
    }
    if (!found) {
        throw NumericalBreakdown("poet_cv_c1: every grid point failed");
    }
    return out;
}

double poet_cv_c1(const ReturnPanel& panel, const std::vector<double>& grid, int folds,
                  int r_max, double tau, bool demean) {
    return poet_cv_scores(panel, grid, folds, r_max, tau, demean).chosen_c1;
}

SymMatrix linear_shrinkage(const ReturnPanel& panel, bool demean) {
    const Eigen::MatrixXd x = dense_returns(panel, demean);
    const Eigen::Index n = x.rows();
    const Eigen::Index t = x.cols();
    if (n < 1 || t < 1) {
        throw InvalidInput("linear_shrinkage: empty panel");
    }
    const SymMatrix s = sample_cov(panel, demean);
    const double m = s.mat().trace() / static_cast<double>(n);
    if (!(m > 0.0)) {
        throw InvalidInput("linear_shrinkage: panel has zero variance");
    }
    // Squared norms use the trace inner product scaled by 1/N.
    const double d2 =
        (s.mat() - m * Eigen::MatrixXd::Identity(n, n)).squaredNorm() /
        static_cast<double>(n);
    if (d2 <= 0.0) {
        return s;  // sample covariance already equals its shrinkage target
    }
    const Eigen::MatrixXd sx = s.mat() * x;
    const double tr_s2 = s.mat().squaredNorm();
    double bbar2 = 0.0;
    for (Eigen::Index j = 0; j < t; ++j) {
        const double xx = x.col(j).squaredNorm();
        const double xsx = x.col(j).dot(sx.col(j));
        bbar2 += (xx * xx - 2.0 * xsx + tr_s2) / static_cast<double>(n);
    }
    bbar2 /= static_cast<double>(t) * static_cast<double>(t);
    const double b2 = std::min(bbar2, d2);
    const double a2 = d2 - b2;
    return SymMatrix((b2 / d2) * m * Eigen::MatrixXd::Identity(n, n) +
                     (a2 / d2) * s.mat());
}

SymMatrix repair_pd(const SymMatrix& a) {
    if (a.dim() == 0) {
        return a;
    }
    // A successful Cholesky certifies positive definiteness without paying
    // for an eigendecomposition.
    Eigen::LLT<Eigen::MatrixXd> llt(a.mat());
    if (llt.info() == Eigen::Success) {
        return a;
    }
    const EigenDecomposition d = sym_eigen(a);
    const double lmin = d.eigenvalues(a.dim() - 1);
    const double eps = (lmin <= 0.0 ? -lmin : 0.0) + 1e-8;
    return SymMatrix(a.mat() + eps * Eigen::MatrixXd::Identity(a.dim(), a.dim()));
}

}  // namespace minvar
