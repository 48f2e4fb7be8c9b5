#pragma once

#include <Eigen/Dense>

#include "minvar/factor_dgp.hpp"
#include "minvar/matrix_core.hpp"

namespace minvar {

/// Inputs for the spectral fixed point: the idiosyncratic eigenvalue
/// distribution (any number of support points, equally weighted), the
/// asset-to-observation ratio gamma = N / T, and the ridge level tau.
struct SpectralLimitInput {
    Eigen::VectorXd omega_eigenvalues;
    double gamma = 0.0;
    double tau = 0.0;
};

/// Companion Stieltjes transform m(-tau): the positive root of
/// m = 1 / (tau + gamma * mean_k(lambda_k / (1 + lambda_k m))), found by a
/// damped fixed point iteration with Aitken acceleration. Converged when the
/// relative step falls below 1e-12; throws SolverFailed after 1e5 iterations.
double stieltjes_m(const SpectralLimitInput& input);

/// Variance inflation constant
/// c = 1 / (1 - m^2 * tr[(I + m Omega)^{-2} Omega^2] / T) evaluated on the
/// full length-N eigenvalue list. Throws OutOfRegime when the denominator is
/// not positive.
double c_tau(double m, const Eigen::VectorXd& omega_eigenvalues, int t_window);

/// Same constant written through the ratio gamma = N / T and the eigenvalue
/// mean, for spectra given as a distribution rather than a full list.
double c_tau_ratio(double m, const Eigen::VectorXd& omega_eigenvalues, double gamma);

/// Asymptotic regime selector for the closed-form relative variance limits.
enum class Regime {
    under,          // gamma in (0, 1):  rv -> 1 / (1 - gamma)
    over_identity,  // gamma in (1, inf), omega proportional to identity:
                    //                    rv -> gamma / (gamma - 1)
    infinite,       // gamma -> infinity: rv -> 1
};

double rv_limit(Regime regime, double gamma = 0.0);

/// Variance of the factor-eliminating weights under the population
/// idiosyncratic covariance, the normalizer in the gamma > 1 risk limit.
double v_omega_v(const FactorModelSpec& spec);

}  // namespace minvar
