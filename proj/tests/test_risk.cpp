#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "minvar/errors.hpp"
#include "minvar/risk.hpp"
#include "minvar/weights.hpp"

using namespace minvar;

namespace {

SymMatrix random_spd(Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd b(n, n + 3);
    for (Eigen::Index j = 0; j < n + 3; ++j)
        for (Eigen::Index i = 0; i < n; ++i) b(i, j) = gauss(rng);
    return SymMatrix(b * b.transpose() / double(n));
}

}  // namespace

TEST_CASE("quadratic_form matches the double loop") {
    SymMatrix a = random_spd(5, 1);
    Eigen::VectorXd w(5);
    w << 0.4, -0.1, 0.3, 0.2, 0.2;
    double acc = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) acc += w(i) * a(i, j) * w(j);
    CHECK(quadratic_form(w, a) == doctest::Approx(acc).epsilon(1e-13));
    CHECK(quadratic_form(WeightVector{w, Method::plugin}, a) ==
          doctest::Approx(acc).epsilon(1e-13));
    CHECK_THROWS_AS(quadratic_form(Eigen::VectorXd::Ones(4), a), InvalidInput);
}

TEST_CASE("relative_variance is one at the oracle and above one elsewhere") {
    SymMatrix sigma = random_spd(7, 2);
    WeightVector oracle = mvp_weight(sigma, Method::oracle);
    CHECK(relative_variance(oracle, sigma) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(relative_variance(equal_weight(7), sigma) >= 1.0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    for (int k = 0; k < 50; ++k) {
        Eigen::VectorXd w(7);
        for (int i = 0; i < 7; ++i) w(i) = gauss(rng);
        w /= w.sum();
        CHECK(relative_variance(WeightVector{w, Method::plugin}, sigma) >= 1.0 - 1e-12);
    }
}

TEST_CASE("relative_variance cached-normalizer overload is consistent") {
    SymMatrix sigma = random_spd(6, 4);
    Eigen::VectorXd x =
        sigma.mat().ldlt().solve(Eigen::VectorXd::Ones(6));
    const double normalizer = x.sum();
    WeightVector w = equal_weight(6);
    CHECK(relative_variance(w, sigma, normalizer) ==
          doctest::Approx(relative_variance(w, sigma)).epsilon(1e-12));
    CHECK_THROWS_AS(relative_variance(w, sigma, 0.0), InvalidInput);
    CHECK_THROWS_AS(relative_variance(w, sigma, -2.0), InvalidInput);
}

TEST_CASE("relative_risk clamps rounding noise and rejects real violations") {
    CHECK(relative_risk(4.0) == doctest::Approx(1.0));
    CHECK(relative_risk(1.0) == 0.0);
    CHECK(relative_risk(1.0 - 1e-9) == 0.0);
    CHECK(relative_risk(1.0 + 1e-9) >= 0.0);
    CHECK_THROWS_AS(relative_risk(1.0 - 1e-7), InvalidInput);
    CHECK_THROWS_AS(relative_risk(0.5), InvalidInput);
}

TEST_CASE("annualized_risk pins the alternating series exactly") {
    std::vector<double> alt;
    for (int i = 0; i < 44; ++i) alt.push_back(i % 2 == 0 ? 0.01 : -0.01);
    CHECK(annualized_risk(alt) ==
          doctest::Approx(0.01 * std::sqrt(252.0)).epsilon(1e-15));

    // Divisor is the series length: {0, 0.02} has deviations of exactly 0.01.
    CHECK(annualized_risk({0.0, 0.02}) ==
          doctest::Approx(0.01 * std::sqrt(252.0)).epsilon(1e-15));

    // 0.25 is exact in binary, so demeaning a constant leaves exact zeros.
    CHECK(annualized_risk({0.25, 0.25, 0.25}) == 0.0);
    CHECK_THROWS_AS(annualized_risk({}), InvalidInput);
}

TEST_CASE("annualized_risk matches a manual computation") {
    std::vector<double> x{0.01, -0.003, 0.007, 0.0, -0.012, 0.004};
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= 6.0;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    CHECK(annualized_risk(x) ==
          doctest::Approx(std::sqrt(ss / 6.0) * std::sqrt(252.0)).epsilon(1e-14));
}

TEST_CASE("risk report serialization") {
    CHECK(risk_report_csv_header() ==
          "method,n_assets,t_window,in_sample_variance,oos_variance,"
          "relative_variance,relative_risk,annualized_risk");

    RiskReport full;
    full.method = "ridgelet1";
    full.n_assets = 100;
    full.t_window = 25;
    full.in_sample_variance = 0.5;
    full.oos_variance = 1.25;
    full.relative_variance = 2.0;
    full.relative_risk = std::sqrt(2.0) - 1.0;
    full.annualized = 0.16;
    CHECK(to_csv_row(full) ==
          "ridgelet1,100,25,0.5,1.25,2,0.414213562373,0.16");

    RiskReport sparse;
    sparse.method = "equal";
    sparse.n_assets = 3;
    sparse.t_window = 4;
    sparse.relative_variance = 1.5;
    CHECK(to_csv_row(sparse) == "equal,3,4,,,1.5,,");
}
