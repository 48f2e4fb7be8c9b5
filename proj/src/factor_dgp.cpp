#include "minvar/factor_dgp.hpp"

#include <cmath>
#include <random>
#include <string>

namespace minvar {

namespace {

void check_build_args(int n, int r, std::pair<double, double> loading_range) {
    if (n < 1) {
        throw InvalidInput("factor model: need at least one asset");
    }
    if (r < 0) {
        throw InvalidInput("factor model: negative factor count");
    }
    if (!(loading_range.first <= loading_range.second)) {
        throw InvalidInput("factor model: empty loading range");
    }
}

// Column-major fill so the draw order is part of the contract.
Eigen::MatrixXd draw_loadings(int n, int r, std::pair<double, double> range,
                              std::mt19937_64& gen) {
    Eigen::MatrixXd b(n, r);
    std::uniform_real_distribution<double> unif(range.first, range.second);
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < n; ++i) {
            b(i, j) = unif(gen);
        }
    }
    return b;
}

Eigen::MatrixXd soft_threshold_offdiag(const Eigen::MatrixXd& base, double thr) {
    Eigen::MatrixXd out = base;
    const Eigen::Index n = out.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j) {
                continue;
            }
            const double mag = std::abs(out(i, j)) - thr;
            out(i, j) = mag > 0.0 ? (out(i, j) > 0.0 ? mag : -mag) : 0.0;
        }
    }
    return out;
}

}  // namespace

FactorModelSpec build_setting1(int n, int r, std::pair<double, double> loading_range,
                               double sigma2, std::uint64_t seed) {
    check_build_args(n, r, loading_range);
    if (!(sigma2 > 0.0)) {
        throw InvalidInput("build_setting1: sigma2 must be positive");
    }
    std::mt19937_64 gen(seed);
    FactorModelSpec spec;
    spec.n_assets = n;
    spec.r = r;
    spec.loadings = draw_loadings(n, r, loading_range, gen);
    spec.omega = SymMatrix(sigma2 * Eigen::MatrixXd::Identity(n, n));
    spec.sigma2 = sigma2;
    spec.seed = seed;
    spec.setting = Setting::setting1;
    return spec;
}

FactorModelSpec build_setting2(int n, int r, std::pair<double, double> loading_range,
                               const SparseOmegaSpec& omega_spec, std::uint64_t seed) {
    check_build_args(n, r, loading_range);
    if (!(omega_spec.diag_lo > 0.0) || !(omega_spec.diag_lo <= omega_spec.diag_hi)) {
        throw InvalidInput("build_setting2: bad diagonal range");
    }
    if (!(omega_spec.offdiag_density >= 0.0) || !(omega_spec.offdiag_density <= 1.0)) {
        throw InvalidInput("build_setting2: density must lie in [0, 1]");
    }
    if (!(omega_spec.offdiag_lo >= 0.0) ||
        !(omega_spec.offdiag_lo <= omega_spec.offdiag_hi)) {
        throw InvalidInput("build_setting2: bad off-diagonal magnitude range");
    }
    if (!(omega_spec.soft_threshold >= 0.0)) {
        throw InvalidInput("build_setting2: negative soft threshold");
    }
    if (!(omega_spec.pd_floor > 0.0)) {
        throw InvalidInput("build_setting2: pd_floor must be positive");
    }

    std::mt19937_64 gen(seed);
    FactorModelSpec spec;
    spec.n_assets = n;
    spec.r = r;
    spec.loadings = draw_loadings(n, r, loading_range, gen);
    spec.seed = seed;
    spec.setting = Setting::setting2;

    std::uniform_real_distribution<double> diag_draw(omega_spec.diag_lo,
                                                     omega_spec.diag_hi);
    std::uniform_real_distribution<double> mag_draw(omega_spec.offdiag_lo,
                                                    omega_spec.offdiag_hi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Eigen::MatrixXd base = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        base(i, i) = diag_draw(gen);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (unit(gen) < omega_spec.offdiag_density) {
                const double mag = mag_draw(gen);
                const double val = unit(gen) < 0.5 ? mag : -mag;
                base(i, j) = val;
                base(j, i) = val;
            }
        }
    }

    double thr = omega_spec.soft_threshold;
    for (int attempt = 0; attempt <= 50; ++attempt) {
        const SymMatrix candidate{soft_threshold_offdiag(base, thr)};
        const EigenDecomposition d = sym_eigen(candidate);
        if (d.eigenvalues(n - 1) >= omega_spec.pd_floor) {
            spec.omega = candidate;
            return spec;
        }
        // A zero threshold cannot escalate multiplicatively, so seed it.
        thr = thr > 0.0 ? thr * 1.5 : 1e-3;
    }
    throw ConstructionFailed(
        "build_setting2: smallest eigenvalue stayed below pd_floor after 50 "
        "thresholding rounds");
}

std::string to_string(Innovation d) {
    switch (d) {
        case Innovation::gaussian: return "gaussian";
        case Innovation::student_t5: return "t5";
        case Innovation::student_t5_raw: return "t5_raw";
    }
    return "unknown";
}

Innovation innovation_from_string(const std::string& name) {
    if (name == "gaussian" || name == "normal") {
        return Innovation::gaussian;
    }
    if (name == "t5" || name == "student_t5") {
        return Innovation::student_t5;
    }
    if (name == "t5_raw" || name == "student_t5_raw") {
        return Innovation::student_t5_raw;
    }
    throw InvalidInput("unknown innovation law '" + name + "'");
}

SymMatrix population_sigma(const FactorModelSpec& spec) {
    const int n = spec.n_assets;
    if (n < 1 || spec.omega.dim() != n) {
        throw InvalidInput("population_sigma: inconsistent model dimensions");
    }
    if (spec.r > 0 && (spec.loadings.rows() != n || spec.loadings.cols() != spec.r)) {
        throw InvalidInput("population_sigma: loadings shape does not match");
    }
    if (spec.r == 0) {
        return spec.omega;
    }
    return SymMatrix(spec.loadings * spec.loadings.transpose() + spec.omega.mat());
}

ReturnSampler::ReturnSampler(const FactorModelSpec& spec)
    : sigma_(population_sigma(spec)), sqrt_sigma_(sqrt_psd(sigma_)) {}

ReturnPanel ReturnSampler::sample(int t, Innovation law, std::uint64_t seed) const {
    if (t < 1) {
        throw InvalidInput("ReturnSampler::sample: need at least one observation");
    }
    const Eigen::Index n = sigma_.dim();
    std::mt19937_64 gen(seed);
    Eigen::MatrixXd w(n, t);
    if (law == Innovation::gaussian) {
        std::normal_distribution<double> dist(0.0, 1.0);
        for (int j = 0; j < t; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                w(i, j) = dist(gen);
            }
        }
    } else {
        // Student t with 5 degrees of freedom has variance 5/3; the scaled
        // variant divides that back out so only the tails change.
        const double scale = law == Innovation::student_t5 ? std::sqrt(3.0 / 5.0) : 1.0;
        std::student_t_distribution<double> dist(5.0);
        for (int j = 0; j < t; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                w(i, j) = scale * dist(gen);
            }
        }
    }
    return ReturnPanel::synthetic(sqrt_sigma_.mat() * w);
}

ReturnPanel sample_returns(const FactorModelSpec& spec, int t, Innovation law,
                           std::uint64_t seed) {
    return ReturnSampler(spec).sample(t, law, seed);
}

OracleSolution oracle_of(const FactorModelSpec& spec) {
    OracleSolution out;
    out.sigma = population_sigma(spec);
    out.weight = mvp_weight(out.sigma, Method::oracle);
    const Eigen::VectorXd x = spd_solve(out.sigma, Eigen::VectorXd::Ones(out.sigma.dim()));
    out.variance = 1.0 / neumaier_sum(x);
    return out;
}

}  // namespace minvar
