#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cnmc/branch.hpp"
#include "cnmc/io.hpp"
#include "cnmc/linearized.hpp"
#include "cnmc/nmc.hpp"
#include "cnmc/verify.hpp"

namespace py = pybind11;
using namespace cnmc;

PYBIND11_MODULE(_cnmc, m) {
    m.doc() = "Nonlocal mean curvature of periodic cylinders and its bifurcating branch";

    auto base = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<PositivityViolation>(m, "PositivityViolation", PyExc_ValueError);
    py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
    py::register_exception<BracketFailure>(m, "BracketFailure", PyExc_RuntimeError);
    py::register_exception<TransversalityFailure>(m, "TransversalityFailure", PyExc_RuntimeError);
    py::register_exception<NewtonDivergence>(m, "NewtonDivergence", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](int N, double alpha) {
                 ModelParams p{N, alpha};
                 p.validate();
                 return p;
             }),
             py::arg("N") = 3, py::arg("alpha") = 0.5)
        .def_readwrite("N", &ModelParams::N)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_property_readonly("m", &ModelParams::m)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(N=" + std::to_string(p.N) + ", alpha=" + fmt17(p.alpha) + ")";
        });

    py::class_<QuadSpec>(m, "QuadSpec")
        .def(py::init<>())
        .def_readwrite("abs_tol", &QuadSpec::abs_tol)
        .def_readwrite("rel_tol", &QuadSpec::rel_tol)
        .def_readwrite("max_subdivisions", &QuadSpec::max_subdivisions)
        .def_readwrite("tail_rel_tol", &QuadSpec::tail_rel_tol)
        .def_readwrite("de_levels", &QuadSpec::de_levels);

    py::class_<Profile>(m, "Profile")
        .def(py::init<>())
        .def(py::init<std::vector<double>>(), py::arg("coeffs"))
        .def(py::init([](std::vector<double> c, std::vector<double> s) {
                 Profile p(std::move(c));
                 p.sin_coeffs = std::move(s);
                 return p;
             }),
             py::arg("coeffs"), py::arg("sin_coeffs"))
        .def_static("constant", &Profile::constant)
        .def_readwrite("coeffs", &Profile::coeffs)
        .def_readwrite("sin_coeffs", &Profile::sin_coeffs)
        .def("__call__", [](const Profile& u, double s) { return eval_u(u, s); })
        .def("derivative", [](const Profile& u, double s, int n) { return eval_derivative(u, n, s); },
             py::arg("s"), py::arg("n") = 1);

    QuadSpec dq;
    m.def("b_alpha", &b_alpha_const, py::arg("params"), py::arg("spec") = dq);
    m.def("g0", &g0_const, py::arg("params"), py::arg("spec") = dq);
    m.def("G_alpha", &G_alpha, py::arg("tau"), py::arg("params"), py::arg("spec") = dq);
    m.def("g_of_rho", &g_of_rho, py::arg("rho"), py::arg("params"), py::arg("spec") = dq);
    m.def("h", &h_of_b, py::arg("b"), py::arg("params"), py::arg("spec") = dq);
    m.def("h_prime", &h_prime, py::arg("b"), py::arg("params"), py::arg("spec") = dq);
    m.def("h_prime_bessel", &h_prime_bessel, py::arg("b"), py::arg("alpha"), py::arg("spec") = dq);

    m.def("nmc_constant", &nmc_constant, py::arg("kappa"), py::arg("params"), py::arg("spec") = dq);
    m.def("nmc_eval", &nmc_eval, py::arg("u"), py::arg("s"), py::arg("params"), py::arg("spec") = dq);
    m.def(
        "nmc_eval_batch",
        [](const Profile& u, const std::vector<double>& s, const ModelParams& p, const QuadSpec& q, int threads) {
            py::gil_scoped_release nogil;
            return nmc_eval_batch(u, s, p, q, threads);
        },
        py::arg("u"), py::arg("s"), py::arg("params"), py::arg("spec") = dq, py::arg("threads") = 1);
    m.def("nmc_eval_lemma21", &nmc_eval_lemma21, py::arg("u"), py::arg("s"), py::arg("params"),
          py::arg("spec") = dq);
    m.def("nmc_eval_iform", &nmc_eval_iform, py::arg("u"), py::arg("s"), py::arg("params"), py::arg("spec") = dq);

    m.def("eigenvalue", &eigenvalue, py::arg("k"), py::arg("mu"), py::arg("params"), py::arg("spec") = dq);
    m.def("find_mu_star", &find_mu_star, py::arg("params"), py::arg("spec") = dq);
    m.def("transversality", &transversality, py::arg("mu_star"), py::arg("params"), py::arg("spec") = dq);
    m.def(
        "eigenvalues",
        [](double mu, int K, const ModelParams& p, int threads) { return spectral_data(mu, K, p, {}, threads).eigenvalues; },
        py::arg("mu"), py::arg("K"), py::arg("params"), py::arg("threads") = 1);

    py::class_<BranchConfig>(m, "BranchConfig")
        .def(py::init<>())
        .def_readwrite("K", &BranchConfig::K)
        .def_readwrite("M", &BranchConfig::M)
        .def_readwrite("a_step", &BranchConfig::a_step)
        .def_readwrite("a_max", &BranchConfig::a_max)
        .def_readwrite("newton_tol", &BranchConfig::newton_tol)
        .def_readwrite("newton_max_iters", &BranchConfig::newton_max_iters)
        .def_readwrite("fd_step", &BranchConfig::fd_step)
        .def_readwrite("threads", &BranchConfig::threads);

    py::class_<BranchPoint>(m, "BranchPoint")
        .def_readonly("a", &BranchPoint::a)
        .def_readonly("mu", &BranchPoint::mu)
        .def_readonly("lambda_", &BranchPoint::lambda)
        .def_readonly("v_coeffs", &BranchPoint::v_coeffs)
        .def_readonly("residual_sup", &BranchPoint::residual_sup)
        .def_readonly("newton_iters", &BranchPoint::newton_iters)
        .def("rescaled", &BranchPoint::rescaled)
        .def("u", &reconstruct_profile, py::arg("s"));

    py::class_<BranchTrace>(m, "BranchTrace")
        .def_readonly("mu_star", &BranchTrace::mu_star)
        .def_readonly("points", &BranchTrace::points)
        .def_readonly("diagnostics", &BranchTrace::diagnostics)
        .def_readonly("first_step_failed", &BranchTrace::first_step_failed);

    m.def(
        "trace_branch",
        [](const BranchConfig& c, const ModelParams& p, const QuadSpec& q) {
            py::gil_scoped_release nogil;
            return trace_branch(c, p, q);
        },
        py::arg("config"), py::arg("params"), py::arg("spec") = dq);

    m.def(
        "verify",
        [](const std::string& suite, int threads) {
            VerifyReport r;
            {
                py::gil_scoped_release nogil;
                r = run_verify(suite, threads);
            }
            py::list out;
            for (const CheckResult& c : r.checks) {
                py::dict d;
                d["suite"] = c.suite;
                d["name"] = c.name;
                d["value"] = c.value;
                d["bound"] = c.bound;
                d["pass"] = c.pass;
                out.append(d);
            }
            return out;
        },
        py::arg("suite") = "", py::arg("threads") = 1);
    (void)base;
}
