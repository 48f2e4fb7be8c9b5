#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>

#include "minvar/matrix_core.hpp"
#include "minvar/panel.hpp"
#include "minvar/weights.hpp"

namespace minvar {

/// Which population covariance family a model was built from.
enum class Setting {
    setting1,  // sigma = B B^T + sigma2 I
    setting2,  // sigma = B B^T + sparse omega
};

/// Parameters of the sparse idiosyncratic covariance used by setting 2.
/// Off-diagonals get a random sign and a magnitude from
/// [offdiag_lo, offdiag_hi]; soft thresholding (escalated by 1.5x per round,
/// at most 50 rounds) restores positive definiteness when the draw lands
/// below pd_floor.
struct SparseOmegaSpec {
    double diag_lo = 0.5;
    double diag_hi = 2.0;
    double offdiag_density = 0.02;
    double offdiag_lo = 0.05;
    double offdiag_hi = 0.3;
    double soft_threshold = 0.01;
    double pd_floor = 0.05;
};

/// A fully realized population model: loadings plus idiosyncratic
/// covariance. Every derived quantity (sigma, its square root, the oracle
/// weights) is a pure function of this struct.
struct FactorModelSpec {
    int n_assets = 0;
    int r = 0;
    Eigen::MatrixXd loadings;      // n_assets x r
    SymMatrix omega;               // sigma2 * I under setting 1
    std::optional<double> sigma2;  // set only under setting 1
    std::uint64_t seed = 0;
    Setting setting = Setting::setting1;
};

/// Draws loadings entrywise from loading_range and pairs them with
/// omega = sigma2 * I.
FactorModelSpec build_setting1(int n, int r, std::pair<double, double> loading_range,
                               double sigma2, std::uint64_t seed);

/// Draws loadings as in setting 1 and a sparse symmetric omega controlled by
/// omega_spec. Throws ConstructionFailed when 50 thresholding rounds cannot
/// push the smallest eigenvalue up to pd_floor.
FactorModelSpec build_setting2(int n, int r, std::pair<double, double> loading_range,
                               const SparseOmegaSpec& omega_spec, std::uint64_t seed);

/// Innovation law for the panel draws.
enum class Innovation {
    gaussian,
    student_t5,      // t with 5 degrees of freedom, rescaled to unit variance
    student_t5_raw,  // unscaled t5, variance 5/3
};

std::string to_string(Innovation d);
Innovation innovation_from_string(const std::string& name);

/// Panel sampler with the symmetric square root of sigma precomputed, so a
/// Monte Carlo loop pays the eigendecomposition once per model rather than
/// once per replication. Sampling is const and pure given (t, law, seed).
class ReturnSampler {
public:
    explicit ReturnSampler(const FactorModelSpec& spec);

    ReturnPanel sample(int t, Innovation law, std::uint64_t seed) const;

    const SymMatrix& sigma() const { return sigma_; }
    const SymMatrix& sqrt_sigma() const { return sqrt_sigma_; }

private:
    SymMatrix sigma_;
    SymMatrix sqrt_sigma_;
};

/// Population covariance B B^T + omega of a model.
SymMatrix population_sigma(const FactorModelSpec& spec);

/// One-shot convenience wrapper around ReturnSampler.
ReturnPanel sample_returns(const FactorModelSpec& spec, int t, Innovation law,
                           std::uint64_t seed);

/// Population covariance with its exact minimum variance solution.
struct OracleSolution {
    SymMatrix sigma;
    WeightVector weight;
    double variance = 0.0;  // 1 / (1^T sigma^{-1} 1)
};

OracleSolution oracle_of(const FactorModelSpec& spec);

}  // namespace minvar
