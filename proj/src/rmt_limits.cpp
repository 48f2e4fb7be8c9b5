#include "minvar/rmt_limits.hpp"

#include <cmath>
#include <string>

#include "minvar/risk.hpp"

namespace minvar {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kRelTol = 1e-12;

double fixed_point_map(double m, const Eigen::VectorXd& lam, double gamma, double tau) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        acc += lam(k) / (1.0 + lam(k) * m);
    }
    return 1.0 / (tau + gamma * acc / static_cast<double>(lam.size()));
}

bool close(double a, double b) {
    return std::abs(a - b) <= kRelTol * std::max(1.0, std::abs(b));
}

}  // namespace

double stieltjes_m(const SpectralLimitInput& input) {
    const Eigen::VectorXd& lam = input.omega_eigenvalues;
    if (lam.size() < 1) {
        throw InvalidInput("stieltjes_m: empty eigenvalue list");
    }
    if (!lam.allFinite() || lam.minCoeff() < 0.0) {
        throw InvalidInput("stieltjes_m: eigenvalues must be finite and nonnegative");
    }
    if (!(input.gamma > 0.0) || !std::isfinite(input.gamma)) {
        throw InvalidInput("stieltjes_m: gamma must be positive and finite");
    }
    if (!(input.tau > 0.0) || !std::isfinite(input.tau)) {
        throw InvalidInput("stieltjes_m: tau must be positive and finite");
    }

    // Value of the map at m = 0; the iteration stays inside (0, 1/tau].
    double m = fixed_point_map(0.0, lam, input.gamma, input.tau);
    double prev2 = m;
    double prev1 = m;
    for (int it = 1; it <= kMaxIterations; ++it) {
        const double next = 0.5 * m + 0.5 * fixed_point_map(m, lam, input.gamma, input.tau);
        if (close(m, next)) {
            return next;
        }
        prev2 = prev1;
        prev1 = m;
        m = next;
        if (it % 8 == 0) {
            // Aitken extrapolation from the last three damped iterates; keep
            // it only when it actually lowers the fixed point residual.
            const double d1 = prev1 - prev2;
            const double d2 = m - prev1;
            const double denom = d2 - d1;
            if (denom != 0.0) {
                const double ait = m - d2 * d2 / denom;
                if (std::isfinite(ait) && ait > 0.0) {
                    const double res_m = std::abs(
                        fixed_point_map(m, lam, input.gamma, input.tau) - m);
                    const double res_a = std::abs(
                        fixed_point_map(ait, lam, input.gamma, input.tau) - ait);
                    if (res_a < res_m) {
                        m = ait;
                    }
                }
            }
        }
    }
    throw SolverFailed("stieltjes_m: no convergence after " +
                       std::to_string(kMaxIterations) + " iterations, last m = " +
                       std::to_string(m));
}

double c_tau(double m, const Eigen::VectorXd& omega_eigenvalues, int t_window) {
    if (t_window < 1) {
        throw InvalidInput("c_tau: t_window must be positive");
    }
    if (omega_eigenvalues.size() < 1) {
        throw InvalidInput("c_tau: empty eigenvalue list");
    }
    return c_tau_ratio(m, omega_eigenvalues,
                       static_cast<double>(omega_eigenvalues.size()) /
                           static_cast<double>(t_window));
}

double c_tau_ratio(double m, const Eigen::VectorXd& omega_eigenvalues, double gamma) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
        throw InvalidInput("c_tau: m must be nonnegative and finite");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidInput("c_tau: gamma must be positive and finite");
    }
    const Eigen::Index n = omega_eigenvalues.size();
    if (n < 1) {
        throw InvalidInput("c_tau: empty eigenvalue list");
    }
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lam = omega_eigenvalues(k);
        const double ratio = lam / (1.0 + lam * m);
        acc += ratio * ratio;
    }
    const double denom = 1.0 - gamma * m * m * acc / static_cast<double>(n);
    if (!(denom > 0.0)) {
        throw OutOfRegime("c_tau: denominator " + std::to_string(denom) +
                          " is not positive");
    }
    return 1.0 / denom;
}

double rv_limit(Regime regime, double gamma) {
    switch (regime) {
        case Regime::under:
            if (!(gamma > 0.0) || !(gamma < 1.0)) {
                throw InvalidInput("rv_limit: under regime needs gamma in (0, 1)");
            }
            return 1.0 / (1.0 - gamma);
        case Regime::over_identity:
            if (!(gamma > 1.0) || !std::isfinite(gamma)) {
                throw InvalidInput(
                    "rv_limit: over_identity regime needs gamma in (1, inf)");
            }
            return gamma / (gamma - 1.0);
        case Regime::infinite:
            return 1.0;
    }
    throw InvalidInput("rv_limit: unknown regime");
}

double v_omega_v(const FactorModelSpec& spec) {
    const int n = spec.n_assets;
    if (n < 1 || spec.omega.dim() != n) {
        throw InvalidInput("v_omega_v: inconsistent model dimensions");
    }
    Eigen::MatrixXd basis(n, 0);
    if (spec.r > 0) {
        // Orthonormal basis of the loading span via the loading Gram matrix.
        const LowRankSpectrum sp = gram_spectrum(spec.loadings, 1.0);
        basis = sp.eigenvectors;
    }
    const WeightVector w = factor_eliminating_weight(basis);
    return quadratic_form(w, spec.omega);
}

}  // namespace minvar
