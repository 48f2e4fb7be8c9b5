#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "minvar/errors.hpp"
#include "minvar/factor_dgp.hpp"
#include "minvar/rmt_limits.hpp"

using namespace minvar;

namespace {

// Closed-form fixed point for a one-point spectrum omega = s2 I:
// tau s2 m^2 + (tau + (gamma - 1) s2) m - 1 = 0, taking the positive root in
// the numerically stable arrangement.
double identity_m(double gamma, double tau, double s2) {
    const double a = tau * s2;
    const double b = tau + (gamma - 1.0) * s2;
    const double disc = std::sqrt(b * b + 4.0 * a);
    if (b > 0.0) return 2.0 / (b + disc);
    return (-b + disc) / (2.0 * a);
}

// Algorithm-independent solver for any discrete spectrum: bisection on
// h(m) = m - map(m), which is increasing on (0, 1/tau].
double bisection_m(const Eigen::VectorXd& lam, double gamma, double tau) {
    auto map = [&](double m) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < lam.size(); ++k)
            acc += lam(k) / (1.0 + lam(k) * m);
        return 1.0 / (tau + gamma * acc / double(lam.size()));
    };
    double lo = 0.0, hi = 1.0 / tau;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid - map(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("stieltjes_m solves the identity-spectrum quadratic") {
    for (double gamma : {0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 10.0}) {
        for (double tau : {1e-8, 1e-4, 0.1, 1.0}) {
            for (double s2 : {0.5, 1.0, 3.0}) {
                Eigen::VectorXd lam(1);
                lam(0) = s2;
                const double m = stieltjes_m({lam, gamma, tau});
                const double expected = identity_m(gamma, tau, s2);
                // At the critical corner (gamma = 1, tau -> 0) the map
                // contracts at rate 1 - O(sqrt(tau)), so the 1e-12 step
                // criterion leaves ~5e-9 of relative error in the root.
                CHECK(m == doctest::Approx(expected).epsilon(5e-8));
            }
        }
    }
}

TEST_CASE("stieltjes_m handles the stiff small-tau under-identified corner") {
    // gamma < 1 with tau = 1e-8 pushes m toward (1 - gamma) / tau ~ 5e7;
    // only a relative convergence test makes sense at that scale.
    Eigen::VectorXd lam(1);
    lam(0) = 1.0;
    const double m = stieltjes_m({lam, 0.5, 1e-8});
    CHECK(m == doctest::Approx(identity_m(0.5, 1e-8, 1.0)).epsilon(1e-9));
    CHECK(m > 1e7);
}

TEST_CASE("stieltjes_m agrees with bisection on multi-point spectra") {
    Eigen::VectorXd two(2);
    two << 0.5, 2.0;
    Eigen::VectorXd five(5);
    five << 0.1, 0.5, 1.0, 2.0, 4.0;
    for (const auto& lam : {two, five}) {
        for (double gamma : {0.5, 2.0, 8.0}) {
            for (double tau : {1e-6, 1e-2, 1.0}) {
                const double m = stieltjes_m({lam, gamma, tau});
                CHECK(m ==
                      doctest::Approx(bisection_m(lam, gamma, tau)).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("stieltjes_m fixed point satisfies its own equation") {
    Eigen::VectorXd lam(3);
    lam << 0.7, 1.3, 2.5;
    const double gamma = 4.0, tau = 1e-8;
    const double m = stieltjes_m({lam, gamma, tau});
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) acc += lam(k) / (1.0 + lam(k) * m);
    const double rhs = 1.0 / (tau + gamma * acc / 3.0);
    CHECK(m == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("stieltjes_m validates input") {
    Eigen::VectorXd ok(1);
    ok << 1.0;
    CHECK_THROWS_AS(stieltjes_m({Eigen::VectorXd(), 1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(stieltjes_m({ok, 0.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(stieltjes_m({ok, -1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(stieltjes_m({ok, 1.0, 0.0}), InvalidInput);
    CHECK_THROWS_AS(stieltjes_m({ok, 1.0, -0.1}), InvalidInput);
    Eigen::VectorXd neg(2);
    neg << 1.0, -0.5;
    CHECK_THROWS_AS(stieltjes_m({neg, 1.0, 1.0}), InvalidInput);
}

TEST_CASE("c_tau reduces to the scalar formula on one-point spectra") {
    const double s2 = 1.5, gamma = 2.0, tau = 0.3;
    Eigen::VectorXd lam(1);
    lam(0) = s2;
    const double m = stieltjes_m({lam, gamma, tau});
    const double ratio = s2 / (1.0 + s2 * m);
    const double expected = 1.0 / (1.0 - gamma * m * m * ratio * ratio);
    CHECK(c_tau_ratio(m, lam, gamma) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected > 1.0);
}

TEST_CASE("c_tau full-list and ratio forms agree") {
    Eigen::VectorXd lam(6);
    lam << 0.5, 0.8, 1.0, 1.2, 1.7, 2.3;
    const double m = stieltjes_m({lam, 3.0, 0.01});
    CHECK(c_tau(m, lam, 2) == doctest::Approx(c_tau_ratio(m, lam, 3.0)).epsilon(1e-14));
}

TEST_CASE("c_tau rejects out-of-regime inputs") {
    Eigen::VectorXd lam(1);
    lam(0) = 1.0;
    // Large m with gamma > 1 drives the denominator negative.
    CHECK_THROWS_AS(c_tau_ratio(100.0, lam, 2.0), OutOfRegime);
    CHECK_THROWS_AS(c_tau_ratio(-0.1, lam, 2.0), InvalidInput);
    CHECK_THROWS_AS(c_tau_ratio(1.0, lam, 0.0), InvalidInput);
    CHECK_THROWS_AS(c_tau_ratio(1.0, Eigen::VectorXd(), 2.0), InvalidInput);
    CHECK_THROWS_AS(c_tau(1.0, lam, 0), InvalidInput);
}

TEST_CASE("rv_limit closed forms") {
    CHECK(rv_limit(Regime::under, 0.5) == doctest::Approx(2.0));
    CHECK(rv_limit(Regime::under, 0.9) == doctest::Approx(10.0));
    CHECK(rv_limit(Regime::over_identity, 2.0) == doctest::Approx(2.0));
    CHECK(rv_limit(Regime::over_identity, 1.25) == doctest::Approx(5.0));
    CHECK(rv_limit(Regime::infinite) == 1.0);

    CHECK_THROWS_AS(rv_limit(Regime::under, 0.0), InvalidInput);
    CHECK_THROWS_AS(rv_limit(Regime::under, 1.0), InvalidInput);
    CHECK_THROWS_AS(rv_limit(Regime::over_identity, 1.0), InvalidInput);
    CHECK_THROWS_AS(rv_limit(Regime::over_identity, 0.5), InvalidInput);
}

TEST_CASE("rv limits fall out of c_tau as tau shrinks") {
    // With an identity idiosyncratic block, c(tau) approaches the closed-form
    // relative variance limit from below as the ridge vanishes.
    Eigen::VectorXd lam(1);
    lam(0) = 1.0;
    for (double gamma : {2.0, 4.0}) {
        double last = 0.0;
        for (double tau : {1e-2, 1e-4, 1e-6, 1e-8}) {
            const double m = stieltjes_m({lam, gamma, tau});
            last = c_tau_ratio(m, lam, gamma);
        }
        CHECK(last == doctest::Approx(rv_limit(Regime::over_identity, gamma))
                          .epsilon(1e-6));
    }
}

TEST_CASE("v_omega_v matches the direct projection computation") {
    FactorModelSpec spec = build_setting1(12, 2, {0.5, 1.5}, 1.3, 7);
    const double got = v_omega_v(spec);

    // Direct route: orthonormalize the loadings by QR, project ones, then
    // evaluate the quadratic form by hand.
    Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(spec.loadings).householderQ() *
        Eigen::MatrixXd::Identity(12, 2);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(12);
    Eigen::VectorXd p = ones - q * (q.transpose() * ones);
    Eigen::VectorXd w = p / p.sum();
    CHECK(got == doctest::Approx(w.dot(spec.omega.mat() * w)).epsilon(1e-10));

    // With no factors the weights are equal weights: v'omega v = sigma2 / N.
    FactorModelSpec flat = build_setting1(10, 0, {0.5, 1.5}, 2.0, 8);
    CHECK(v_omega_v(flat) == doctest::Approx(0.2).epsilon(1e-12));
}
