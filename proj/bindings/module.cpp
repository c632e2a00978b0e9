#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hetnet/io.hpp"
#include "hetnet/version.hpp"

namespace py = pybind11;
using namespace hetnet;

namespace {

CoverageOptions make_options(const std::string& mode, bool full_adaptive_outer,
                             int threads) {
    CoverageOptions opt;
    if (mode == "exact") opt.mode = IntraMode::ExactTruncatedSum;
    else if (mode == "simplified") opt.mode = IntraMode::SimplifiedExponential;
    else throw std::invalid_argument("mode must be 'simplified' or 'exact'");
    opt.full_adaptive_outer = full_adaptive_outer;
    opt.threads = threads;
    return opt;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "coverage and throughput of two-tier HetNets with clustered "
              "users and small cells";
    m.attr("__version__") = kVersion;

    py::enum_<Tier>(m, "Tier")
        .value("MACRO", Tier::Macro)
        .value("SMALL", Tier::Small);
    py::enum_<Policy>(m, "Policy")
        .value("P1", Policy::P1)
        .value("P2", Policy::P2);

    py::class_<NetworkParams>(m, "NetworkParams")
        .def(py::init([](double lambda_m, double lambda_p, int n_s0,
                         double nbar_as, double sigma_s, double sigma_u,
                         double P_m_dbm, double P_s_dbm, double P_0_dbm,
                         double alpha, double beta_db) {
                 NetworkParams p;
                 p.lambda_m = lambda_m;
                 p.lambda_p = lambda_p;
                 p.n_s0 = n_s0;
                 p.nbar_as = nbar_as;
                 p.sigma_s = sigma_s;
                 p.sigma_u = sigma_u;
                 p.P_m = dbm_to_mw(P_m_dbm);
                 p.P_s = dbm_to_mw(P_s_dbm);
                 p.P_0 = dbm_to_mw(P_0_dbm);
                 p.alpha = alpha;
                 p.beta = db_to_linear(beta_db);
                 p.validate();
                 return p;
             }),
             py::kw_only(), py::arg("lambda_m") = 1.0, py::arg("lambda_p") = 10.0,
             py::arg("n_s0") = 10, py::arg("nbar_as") = 3.0,
             py::arg("sigma_s") = 0.04, py::arg("sigma_u") = 0.04,
             py::arg("P_m_dbm") = 53.0, py::arg("P_s_dbm") = 23.0,
             py::arg("P_0_dbm") = 71.87394998465425, py::arg("alpha") = 4.0,
             py::arg("beta_db") = 0.0)
        .def_readonly("lambda_m", &NetworkParams::lambda_m)
        .def_readonly("lambda_p", &NetworkParams::lambda_p)
        .def_readonly("n_s0", &NetworkParams::n_s0)
        .def_readwrite("nbar_as", &NetworkParams::nbar_as)
        .def_readonly("sigma_s", &NetworkParams::sigma_s)
        .def_readonly("sigma_u", &NetworkParams::sigma_u)
        .def_readonly("P_m", &NetworkParams::P_m)
        .def_readonly("P_s", &NetworkParams::P_s)
        .def_readonly("P_0", &NetworkParams::P_0)
        .def_readonly("alpha", &NetworkParams::alpha)
        .def_readonly("beta", &NetworkParams::beta)
        .def_readonly("D_km", &NetworkParams::D_km)
        .def_readonly("xi_sm", &NetworkParams::xi_sm)
        .def_readonly("xi_ms", &NetworkParams::xi_ms)
        .def("validate", &NetworkParams::validate)
        .def("with_distance_threshold",
             [](const NetworkParams& p, double d) {
                 return with_distance_threshold(p, d);
             },
             py::arg("d_km"));

    py::class_<ClusterKernel>(m, "ClusterKernel")
        .def_static("gaussian", &ClusterKernel::gaussian, py::arg("sigma_km"))
        .def_static("custom", &ClusterKernel::custom, py::arg("pdf2d"),
                    py::arg("scale_km"))
        .def_property_readonly("is_gaussian", &ClusterKernel::is_gaussian)
        .def_property_readonly("radial_extent", &ClusterKernel::radial_extent);

    py::class_<TierValue>(m, "TierValue")
        .def_readonly("macro", &TierValue::macro)
        .def_readonly("small", &TierValue::small);

    py::class_<CoverageReport>(m, "CoverageReport")
        .def_readonly("policy", &CoverageReport::policy)
        .def_readonly("per_tier_coverage", &CoverageReport::per_tier_coverage)
        .def_readonly("total_coverage", &CoverageReport::total_coverage)
        .def_readonly("assoc_prob_avg", &CoverageReport::assoc_prob_avg)
        .def_readonly("throughput", &CoverageReport::throughput)
        .def_readonly("trials", &CoverageReport::trials)
        .def_readonly("half_width_95", &CoverageReport::half_width_95)
        .def_property_readonly("provenance",
                               [](const CoverageReport& r) {
                                   return r.provenance == Provenance::Analytic
                                              ? "analytic"
                                              : "simulated";
                               })
        .def("__repr__", [](const CoverageReport& r) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "<CoverageReport %s total=%.5f macro=%.5f "
                          "small=%.5f throughput=%.5f>",
                          to_string(r.policy), r.total_coverage,
                          r.per_tier_coverage.macro, r.per_tier_coverage.small,
                          r.throughput);
            return std::string(buf);
        });

    m.def("bessel_i0", &numerics::bessel_i0, py::arg("x"));
    m.def("bessel_i0_scaled", &numerics::bessel_i0_scaled, py::arg("x"));
    m.def("marcum_q1", &numerics::marcum_q1, py::arg("a"), py::arg("b"));
    m.def("sinc_alpha", &numerics::sinc_alpha, py::arg("alpha"));

    m.def("distance_pdf", &distance_pdf, py::arg("kernel"), py::arg("u"),
          py::arg("nu0"));
    m.def("distance_cdf", &distance_cdf_general, py::arg("kernel"), py::arg("u"),
          py::arg("nu0"));
    m.def("user_center_distance_pdf", &user_center_distance_pdf,
          py::arg("kernel"), py::arg("nu0"));
    m.def("nearest_sbs_cdf", &nearest_sbs_cdf, py::arg("params"),
          py::arg("kernel"), py::arg("r_s"), py::arg("nu0"));
    m.def("assoc_prob", &assoc_prob, py::arg("params"), py::arg("kernel"),
          py::arg("policy"), py::arg("nu0"), py::arg("tier"));

    m.def(
        "coverage",
        [](const NetworkParams& p, Policy policy, const std::string& mode,
           bool full_adaptive_outer, int threads) {
            const ClusterKernel kernel = ClusterKernel::gaussian(p.sigma_s);
            const CoverageEngine engine(
                p, kernel, make_options(mode, full_adaptive_outer, threads));
            return engine.coverage(policy);
        },
        py::arg("params"), py::arg("policy"), py::kw_only(),
        py::arg("mode") = "simplified", py::arg("full_adaptive_outer") = false,
        py::arg("threads") = 0,
        "analytic coverage/throughput for a Gaussian (Thomas) kernel");

    m.def(
        "simulate_coverage",
        [](const NetworkParams& p, Policy policy, std::uint64_t trials,
           std::uint64_t seed, double window_radius, int threads) {
            SimConfig sim;
            sim.trials = trials;
            sim.seed = seed;
            sim.window_radius = window_radius;
            sim.threads = threads;
            const ClusterKernel kernel = ClusterKernel::gaussian(p.sigma_s);
            return simulate_coverage(p, kernel, policy, sim);
        },
        py::arg("params"), py::arg("policy"), py::kw_only(),
        py::arg("trials") = 100000, py::arg("seed") = 1,
        py::arg("window_radius") = 3.0, py::arg("threads") = 0,
        "Monte Carlo coverage/throughput for a Gaussian (Thomas) kernel");

    m.def(
        "optimal_threshold",
        [](const NetworkParams& p, const std::vector<double>& d_grid,
           const std::string& mode, int threads) {
            const ClusterKernel kernel = ClusterKernel::gaussian(p.sigma_s);
            return optimal_threshold(p, kernel, d_grid,
                                     make_options(mode, false, threads));
        },
        py::arg("params"), py::arg("d_grid"), py::kw_only(),
        py::arg("mode") = "simplified", py::arg("threads") = 0,
        "argmax of Policy-2 total coverage over a D grid; returns (D*, "
        "coverage)");

    m.def("throughput", &throughput, py::arg("params"), py::arg("coverage_macro"),
          py::arg("coverage_small"), py::arg("policy"));
}
