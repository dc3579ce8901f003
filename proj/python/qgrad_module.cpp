#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qgrad/dae.hpp"
#include "qgrad/experiment.hpp"
#include "qgrad/grad_operator.hpp"
#include "qgrad/hhl.hpp"
#include "qgrad/k_truncation.hpp"
#include "qgrad/noise.hpp"
#include "qgrad/optimizer.hpp"
#include "qgrad/poly_core.hpp"

namespace py = pybind11;
using namespace qgrad;

namespace {

Direction direction_from_string(const std::string& s) {
  if (s == "maximize") return Direction::Maximize;
  if (s == "minimize") return Direction::Minimize;
  throw std::invalid_argument("direction must be 'maximize' or 'minimize'");
}

py::dict trace_to_dict(const IterationTrace& trace) {
  const Eigen::Index d = trace.x0.size();
  const int n = trace.iterations();
  Eigen::MatrixXd xs(n + 1, d);
  Eigen::VectorXd f(n + 1), grad_norm(n + 1), p_succ(n + 1), cos_gamma(n + 1);
  xs.row(0) = trace.x0.transpose();
  f(0) = trace.f0;
  grad_norm(0) = trace.grad_norm0;
  p_succ(0) = 1.0;
  cos_gamma(0) = trace.cos_gamma0;
  for (int t = 0; t < n; ++t) {
    const StepResult& s = trace.steps[static_cast<std::size_t>(t)];
    xs.row(t + 1) = s.x_next.transpose();
    f(t + 1) = s.f_next;
    grad_norm(t + 1) = s.grad_norm;
    p_succ(t + 1) = s.p_succ_measured;
    cos_gamma(t + 1) = s.cos_gamma;
  }
  py::dict out;
  out["x"] = xs;
  out["f"] = f;
  out["grad_norm"] = grad_norm;
  out["p_succ"] = p_succ;
  out["cos_gamma"] = cos_gamma;
  out["termination"] = to_string(trace.termination);
  out["iterations"] = n;
  return out;
}

OptimizerConfig config_from_kwargs(double xi, int max_iters, double stop_tol,
                                   const std::string& mode, int ne,
                                   const std::string& direction, std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.xi = xi;
  cfg.max_iters = max_iters;
  cfg.stop_tol = stop_tol;
  cfg.mode = (mode == "circuit") ? Mode::Circuit : Mode::ExactMatrix;
  cfg.phase = PhaseEstimateConfig::from_width(ne);
  if (!direction.empty()) cfg.direction = direction_from_string(direction);
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_qgrad, m) {
  m.doc() = "statevector simulator of the dressed-encoding quantum gradient protocol";

  py::register_exception<TrapStateError>(m, "TrapStateError");
  py::register_exception<ZeroBranchError>(m, "ZeroBranchError");

  py::class_<PolynomialProblem>(m, "PolynomialProblem")
      .def_readonly("d", &PolynomialProblem::d)
      .def_readonly("p", &PolynomialProblem::p)
      .def_readonly("A", &PolynomialProblem::A)
      .def_readonly("scale_factor", &PolynomialProblem::scale_factor)
      .def_property_readonly("direction", [](const PolynomialProblem& pb) {
        return to_string(pb.direction);
      });

  py::class_<DressedState>(m, "DressedState")
      .def_readonly("amps", &DressedState::amps)
      .def_readonly("cos_gamma", &DressedState::cos_gamma)
      .def_readonly("d", &DressedState::d);

  py::class_<GradientOperator>(m, "GradientOperator")
      .def_readonly("matrix", &GradientOperator::matrix)
      .def_readonly("spectral_radius", &GradientOperator::spectral_radius)
      .def_readonly("prescale", &GradientOperator::prescale);

  m.def(
      "make_problem",
      [](const Eigen::MatrixXd& a_raw, int p, const std::string& direction) {
        return symmetrize_and_scale(a_raw, p, direction_from_string(direction));
      },
      py::arg("a_raw"), py::arg("p"), py::arg("direction") = "minimize",
      "Symmetrize and scale a raw coefficient matrix into a problem.");
  m.def("preset_f1", &preset_f1);
  m.def("preset_f2", &preset_f2);

  m.def("eval_cost", &eval_cost, py::arg("problem"), py::arg("x"));
  m.def(
      "classical_gradient",
      [](const PolynomialProblem& pb, const Eigen::VectorXd& x) {
        const GradientPair g = classical_gradient(pb, x);
        return py::make_tuple(g.kappa, g.grad);
      },
      py::arg("problem"), py::arg("x"), "Returns (kappa, grad f).");
  m.def("finite_diff_gradient", &finite_diff_gradient, py::arg("problem"),
        py::arg("x"), py::arg("delta") = 1e-5);

  m.def("encode", &encode, py::arg("x"));
  m.def("decode", &decode, py::arg("state"), py::arg("trap_tolerance") = kTrapTolerance);
  m.def(
      "estimate_cos_gamma",
      [](const DressedState& state, std::uint64_t shots, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return estimate_cos_gamma(state, shots, rng);
      },
      py::arg("state"), py::arg("shots"), py::arg("seed") = 0);

  m.def("build_D_exact", &build_D_exact, py::arg("problem"), py::arg("state"));
  m.def("evolution", &evolution, py::arg("op"), py::arg("t"),
        "e^{-iDt} as a dense unitary.");
  m.def("qpca_evolve", &qpca_evolve, py::arg("rho_X"), py::arg("problem"),
        py::arg("t"), py::arg("m"));
  m.def("qpca_copy_count", &qpca_copy_count, py::arg("problem"), py::arg("eps_pca"),
        "Copies of |X> the qPCA channel would consume for the target accuracy.");
  m.def("signed_readout", &signed_readout, py::arg("j"), py::arg("chi"));
  m.def(
      "success_probability",
      [](const DressedState& state, const GradientOperator& op, double eta,
         const std::string& direction) {
        return success_probability_closed_form(state, op, eta,
                                               direction_from_string(direction));
      },
      py::arg("state"), py::arg("op"), py::arg("eta"), py::arg("direction"));

  m.def(
      "optimize",
      [](const PolynomialProblem& pb, const Eigen::VectorXd& x0, double xi,
         int max_iters, double stop_tol, const std::string& mode, int ne,
         const std::string& direction, std::uint64_t seed) {
        const OptimizerConfig cfg =
            config_from_kwargs(xi, max_iters, stop_tol, mode, ne, direction, seed);
        return trace_to_dict(run(pb, x0, cfg));
      },
      py::arg("problem"), py::arg("x0"), py::arg("xi") = 0.1,
      py::arg("max_iters") = 200, py::arg("stop_tol") = 1e-8,
      py::arg("mode") = "exact", py::arg("ne") = 12, py::arg("direction") = "",
      py::arg("seed") = 0,
      "Run the full iterative protocol; returns the trace as arrays.");

  m.def("cli_main", &run_command, py::arg("args"),
        "Invoke the experiment harness as from the command line.");
}
