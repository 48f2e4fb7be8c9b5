// Python surface of the library. Panels cross the boundary as plain
// asset-by-time ndarrays and get synthetic ids and dates attached, which is
// all the numerical routines need.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "minvar/cov_estimators.hpp"
#include "minvar/errors.hpp"
#include "minvar/estimators.hpp"
#include "minvar/factor_dgp.hpp"
#include "minvar/risk.hpp"
#include "minvar/rmt_limits.hpp"
#include "minvar/version.hpp"
#include "minvar/weights.hpp"

namespace py = pybind11;
using namespace minvar;

namespace {

ReturnPanel wrap(const Eigen::MatrixXd& returns) {
    return ReturnPanel::synthetic(returns);
}

Regime regime_from_string(const std::string& name) {
    if (name == "under") return Regime::under;
    if (name == "over_identity") return Regime::over_identity;
    if (name == "infinite") return Regime::infinite;
    throw InvalidInput("unknown regime: " + name);
}

}  // namespace

PYBIND11_MODULE(minvar, m) {
    m.doc() = "High-dimensional minimum variance portfolios";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "Error");

    py::class_<FactorModelSpec>(m, "FactorModelSpec")
        .def_readonly("n_assets", &FactorModelSpec::n_assets)
        .def_readonly("r", &FactorModelSpec::r)
        .def_readonly("loadings", &FactorModelSpec::loadings)
        .def_property_readonly(
            "omega", [](const FactorModelSpec& s) { return s.omega.mat(); })
        .def_readonly("seed", &FactorModelSpec::seed);

    m.def(
        "build_setting1",
        [](int n, int r, double loading_lo, double loading_hi, double sigma2,
           std::uint64_t seed) {
            return build_setting1(n, r, {loading_lo, loading_hi}, sigma2, seed);
        },
        py::arg("n"), py::arg("r"), py::arg("loading_lo") = 0.5,
        py::arg("loading_hi") = 1.5, py::arg("sigma2") = 1.0, py::arg("seed") = 1);

    m.def(
        "build_setting2",
        [](int n, int r, double loading_lo, double loading_hi, std::uint64_t seed) {
            return build_setting2(n, r, {loading_lo, loading_hi}, SparseOmegaSpec{},
                                  seed);
        },
        py::arg("n"), py::arg("r"), py::arg("loading_lo") = 0.5,
        py::arg("loading_hi") = 1.5, py::arg("seed") = 1);

    m.def(
        "population_sigma",
        [](const FactorModelSpec& spec) { return population_sigma(spec).mat(); },
        py::arg("spec"));

    m.def(
        "sample_returns",
        [](const FactorModelSpec& spec, int t, const std::string& law,
           std::uint64_t seed) {
            return sample_returns(spec, t, innovation_from_string(law), seed).values();
        },
        py::arg("spec"), py::arg("t"), py::arg("law") = "gaussian", py::arg("seed") = 1);

    m.def(
        "oracle_variance",
        [](const FactorModelSpec& spec) { return oracle_of(spec).variance; },
        py::arg("spec"));

    m.def(
        "sample_cov",
        [](const Eigen::MatrixXd& returns, bool demean) {
            return sample_cov(wrap(returns), demean).mat();
        },
        py::arg("returns"), py::arg("demean") = false);

    m.def(
        "linear_shrinkage",
        [](const Eigen::MatrixXd& returns, bool demean) {
            return linear_shrinkage(wrap(returns), demean).mat();
        },
        py::arg("returns"), py::arg("demean") = false);

    m.def(
        "poet",
        [](const Eigen::MatrixXd& returns, int r_max, double c1, bool demean) {
            PoetResult res = poet(wrap(returns), r_max, c1, demean);
            py::dict out;
            out["r_hat"] = res.r_hat;
            out["loadings"] = res.loadings_hat;
            out["omega"] = res.omega_hat.mat();
            out["residual_cov"] = res.residual_cov.mat();
            out["eta_t"] = res.eta_t;
            return out;
        },
        py::arg("returns"), py::arg("r_max") = 8, py::arg("c1") = 0.5,
        py::arg("demean") = false);

    m.def(
        "poet_cv",
        [](const Eigen::MatrixXd& returns, std::vector<double> grid, int folds,
           int r_max, double tau, bool demean) {
            if (grid.empty()) grid = default_c1_grid();
            PoetCvResult res = poet_cv_scores(wrap(returns), grid, folds, r_max, tau,
                                              demean);
            py::dict out;
            out["chosen_c1"] = res.chosen_c1;
            out["grid"] = res.grid;
            out["scores"] = res.scores;
            return out;
        },
        py::arg("returns"), py::arg("grid") = std::vector<double>{},
        py::arg("folds") = 5, py::arg("r_max") = 8, py::arg("tau") = kDefaultTau,
        py::arg("demean") = false);

    m.def(
        "mvp_weights",
        [](const Eigen::MatrixXd& cov) { return mvp_weight(SymMatrix(cov)).weights; },
        py::arg("cov"));

    m.def(
        "ridgelet1_weights",
        [](const Eigen::MatrixXd& returns, double tau, bool demean) {
            return ridgelet1_weight(wrap(returns), tau, demean).weights;
        },
        py::arg("returns"), py::arg("tau") = kDefaultTau, py::arg("demean") = false);

    m.def(
        "ridgelet2_weights",
        [](const Eigen::MatrixXd& returns, const Eigen::MatrixXd& omega, double tau,
           bool demean) {
            return ridgelet2_weight(wrap(returns), SymMatrix(omega), tau, demean)
                .weights;
        },
        py::arg("returns"), py::arg("omega"), py::arg("tau") = kDefaultTau,
        py::arg("demean") = false);

    m.def(
        "ridgeless_weights",
        [](const Eigen::MatrixXd& returns, bool demean) {
            return ridgeless_weight(wrap(returns), demean).weights;
        },
        py::arg("returns"), py::arg("demean") = false);

    m.def(
        "exact_zvp_weights",
        [](const Eigen::MatrixXd& returns, bool demean) {
            return exact_zvp_weight(wrap(returns), demean).weights;
        },
        py::arg("returns"), py::arg("demean") = false);

    m.def(
        "equal_weights", [](Eigen::Index n) { return equal_weight(n).weights; },
        py::arg("n"));

    m.def(
        "estimate_weights",
        [](const std::string& kind, const Eigen::MatrixXd& returns, double tau,
           bool demean, int r_max, double c1, bool c1_cv, int cv_folds) {
            EstimatorOptions opts;
            opts.tau = tau;
            opts.demean = demean;
            opts.r_max = r_max;
            opts.c1 = c1;
            opts.c1_cv = c1_cv;
            opts.cv_folds = cv_folds;
            return estimate_weights(estimator_from_string(kind), wrap(returns), opts)
                .weights;
        },
        py::arg("kind"), py::arg("returns"), py::arg("tau") = kDefaultTau,
        py::arg("demean") = false, py::arg("r_max") = 8, py::arg("c1") = 0.5,
        py::arg("c1_cv") = false, py::arg("cv_folds") = 5);

    m.def(
        "quadratic_form",
        [](const Eigen::VectorXd& w, const Eigen::MatrixXd& a) {
            return quadratic_form(w, SymMatrix(a));
        },
        py::arg("weights"), py::arg("matrix"));

    m.def(
        "relative_variance",
        [](const Eigen::VectorXd& w, const Eigen::MatrixXd& sigma) {
            WeightVector wv{w, Method::plugin};
            return relative_variance(wv, SymMatrix(sigma));
        },
        py::arg("weights"), py::arg("sigma"));

    m.def("relative_risk", &relative_risk, py::arg("relative_variance"));
    m.def("annualized_risk", &annualized_risk, py::arg("daily_returns"));

    m.def(
        "stieltjes_m",
        [](const Eigen::VectorXd& omega_eigenvalues, double gamma, double tau) {
            return stieltjes_m({omega_eigenvalues, gamma, tau});
        },
        py::arg("omega_eigenvalues"), py::arg("gamma"), py::arg("tau"));

    m.def("c_tau", &c_tau, py::arg("m"), py::arg("omega_eigenvalues"),
          py::arg("t_window"));
    m.def("c_tau_ratio", &c_tau_ratio, py::arg("m"), py::arg("omega_eigenvalues"),
          py::arg("gamma"));

    m.def(
        "rv_limit",
        [](const std::string& regime, double gamma) {
            return rv_limit(regime_from_string(regime), gamma);
        },
        py::arg("regime"), py::arg("gamma") = 0.0);
}
