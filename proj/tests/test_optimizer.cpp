#include <doctest.h>

#include <cmath>
#include <cstring>

#include "qgrad/experiment.hpp"
#include "qgrad/k_truncation.hpp"
#include "qgrad/optimizer.hpp"
#include "test_util.hpp"

using namespace qgrad;

namespace {

// classical iterate oracle: x'_i = (cos^2 X_i - sin^2 (K D X)_i) / (cos^2 X_0)
// written through poly_core quantities only
Eigen::VectorXd descent_oracle(const PolynomialProblem& problem,
                               const Eigen::VectorXd& x, double xi) {
  const DressedState state = encode(x);
  const GradientOperator op = build_D_exact(problem, state);
  const GradientPair g = classical_gradient(problem, x);
  const double factor =
      op.prescale * std::pow(state.cos_gamma, 2 * problem.p - 2);
  return x - xi * factor * g.grad;
}

bool traces_identical(const IterationTrace& a, const IterationTrace& b) {
  if (a.steps.size() != b.steps.size() || a.termination != b.termination) return false;
  if (std::memcmp(a.x0.data(), b.x0.data(), sizeof(double) * a.x0.size()) != 0)
    return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    const StepResult& s = a.steps[i];
    const StepResult& t = b.steps[i];
    if (std::memcmp(s.x_next.data(), t.x_next.data(),
                    sizeof(double) * s.x_next.size()) != 0)
      return false;
    if (s.f_next != t.f_next || s.grad_norm != t.grad_norm ||
        s.p_succ_closed != t.p_succ_closed || s.p_succ_measured != t.p_succ_measured ||
        s.cos_gamma != t.cos_gamma)
      return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("config validation and the xi bound flag") {
  OptimizerConfig config;
  config.xi = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.xi = 1.0 / 3.0;
  config.validate();
  CHECK_FALSE(config.xi_exceeds_bound());
  CHECK(std::tan(config.eta()) * std::tan(config.eta()) ==
        doctest::Approx(config.xi).epsilon(1e-14));
  config.xi = 0.6;
  CHECK(config.xi_exceeds_bound());
}

TEST_CASE("vanishing learning rate reproduces the identity step") {
  const PolynomialProblem problem = preset_f2();
  const Eigen::Vector2d x(1.3, -0.4);
  OptimizerConfig config;
  config.xi = 1e-12;
  const StepResult r = iterate_once(encode(x), problem, config);
  CHECK((r.x_next - x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("exact step follows the classical iterate oracle and descends") {
  const PolynomialProblem problem = preset_f2();
  const Eigen::Vector2d x(5, 5);
  OptimizerConfig config;
  config.xi = 0.1;
  const StepResult r = iterate_once(encode(x), problem, config);
  const Eigen::VectorXd expected = descent_oracle(problem, x, config.xi);
  CHECK((r.x_next - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.f_next < eval_cost(problem, x));
}

TEST_CASE("success probability closed form") {
  std::mt19937_64 rng(91);
  SUBCASE("eta = 0 gives certainty") {
    const PolynomialProblem problem = testutil::random_problem(2, 2, rng);
    const DressedState state = encode(testutil::random_vector(2, rng, 3.0));
    const GradientOperator op = build_D_exact(problem, state);
    CHECK(success_probability_closed_form(state, op, 0.0, Direction::Minimize) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("xi = 1/3 bound of 3/16 on random instances") {
    const double eta = std::atan(std::sqrt(1.0 / 3.0));
    CHECK(std::cos(eta) * std::cos(eta) == doctest::Approx(0.75).epsilon(1e-14));
    for (int round = 0; round < 100; ++round) {
      const int d = 1 + static_cast<int>(rng() % 3);
      const PolynomialProblem problem = testutil::random_problem(d, 2, rng);
      const DressedState state = encode(testutil::random_vector(d, rng, 4.0));
      const GradientOperator op = build_D_exact(problem, state);
      const Direction dir = (rng() & 1) ? Direction::Maximize : Direction::Minimize;
      CHECK(success_probability_closed_form(state, op, eta, dir) >= 3.0 / 16.0 - 1e-12);
    }
  }
  SUBCASE("closed form equals the measured probability on exact spectra") {
    const Eigen::MatrixXd q = testutil::random_orthogonal(2, rng);
    Eigen::VectorXd lambdas(2);
    lambdas << 10.0 / 32.0, -13.0 / 32.0;  // exactly representable at chi = 5
    const GradientOperator op =
        GradientOperator::from_matrix(q * lambdas.asDiagonal() * q.transpose());
    const DressedState state = encode(Eigen::VectorXd::Constant(1, 1.4));
    OptimizerConfig config;
    config.xi = 0.25;
    config.mode = Mode::Circuit;
    config.phase = PhaseEstimateConfig::from_width(5);
    const PolynomialProblem problem = preset_f1();
    const StepResult r = iterate_with_operator(state, problem, config, op);
    CHECK(std::abs(r.p_succ_measured -
                   success_probability_closed_form(state, op, config.eta(),
                                                   Direction::Minimize)) < 1e-9);
  }
}

TEST_CASE("circuit step tracks the exact step within the truncation bound") {
  const PolynomialProblem problem = preset_f2();
  const Eigen::Vector2d x(5, 5);
  OptimizerConfig exact;
  exact.xi = 0.1;
  OptimizerConfig circuit = exact;
  circuit.mode = Mode::Circuit;
  circuit.phase = PhaseEstimateConfig::from_width(12);
  const StepResult re = iterate_once(encode(x), problem, exact);
  const StepResult rc = iterate_once(encode(x), problem, circuit);
  CHECK((re.x_next - rc.x_next).cwiseAbs().maxCoeff() < 5.0 * std::pow(2.0, -11));
}

TEST_CASE("mode equivalence holds per step and cumulatively over 50 steps") {
  const PolynomialProblem problem = preset_f2();
  OptimizerConfig exact;
  exact.xi = 0.1;
  exact.max_iters = 50;
  exact.stop_tol = 1e-14;
  OptimizerConfig circuit = exact;
  circuit.mode = Mode::Circuit;
  circuit.phase = PhaseEstimateConfig::from_width(12);
  const IterationTrace te = run(problem, Eigen::Vector2d(5, 5), exact);
  const IterationTrace tc = run(problem, Eigen::Vector2d(5, 5), circuit);
  REQUIRE(te.iterations() == 50);
  REQUIRE(tc.iterations() == 50);
  const double tol = 5.0 * std::pow(2.0, -11);
  for (int t = 0; t < 50; ++t) {
    const auto& xe = te.steps[static_cast<std::size_t>(t)].x_next;
    const auto& xc = tc.steps[static_cast<std::size_t>(t)].x_next;
    CHECK((xe - xc).cwiseAbs().maxCoeff() < tol);
  }
}

TEST_CASE("full run on the 2-d benchmark reaches the origin from all corners") {
  const PolynomialProblem problem = preset_f2();
  OptimizerConfig config;
  config.xi = 0.1;
  config.max_iters = 800;
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0}) {
      const IterationTrace trace = run(problem, Eigen::Vector2d(5 * sx, 5 * sy), config);
      CHECK(trace.final_x().norm() < 1e-2);
    }
}

TEST_CASE("descent is monotone over the first ten iterations at small xi") {
  OptimizerConfig config;
  config.xi = 0.05;
  config.max_iters = 10;
  config.stop_tol = 1e-14;
  for (const char* which : {"f1", "f2"}) {
    const PolynomialProblem problem =
        std::string(which) == "f1" ? preset_f1() : preset_f2();
    const Eigen::VectorXd x0 = problem.d == 1
                                   ? Eigen::VectorXd::Constant(1, 4.0)
                                   : Eigen::VectorXd(Eigen::Vector2d(5, 5));
    const IterationTrace trace = run(problem, x0, config);
    double prev = trace.f0;
    for (const StepResult& s : trace.steps) {
      CHECK(s.f_next < prev);
      prev = s.f_next;
    }
  }
}

TEST_CASE("max_iters = 0 yields only the initial point") {
  OptimizerConfig config;
  config.max_iters = 0;
  const IterationTrace trace = run(preset_f2(), Eigen::Vector2d(1, 1), config);
  CHECK(trace.iterations() == 0);
  CHECK(trace.termination == Termination::MaxIters);
  CHECK(trace.final_x() == Eigen::Vector2d(1, 1));
}

TEST_CASE("identical seeds give bit-identical traces") {
  const PolynomialProblem problem = preset_f2();
  OptimizerConfig config;
  config.xi = 0.1;
  config.max_iters = 12;
  config.mode = Mode::Circuit;
  config.phase = PhaseEstimateConfig::from_width(6);
  config.seed = 424242;
  NoiseConfig noise;
  noise.d_strength = 0.02;
  noise.trials = 1;
  const IterationTrace a = run(problem, Eigen::Vector2d(2, -1), config, &noise);
  const IterationTrace b = run(problem, Eigen::Vector2d(2, -1), config, &noise);
  CHECK(traces_identical(a, b));
}

TEST_CASE("sampled post-selection follows the same trajectory") {
  const PolynomialProblem problem = preset_f2();
  OptimizerConfig exact_projection;
  exact_projection.xi = 0.2;
  exact_projection.max_iters = 5;
  exact_projection.mode = Mode::Circuit;
  exact_projection.phase = PhaseEstimateConfig::from_width(5);
  OptimizerConfig sampled = exact_projection;
  sampled.sample_post_selection = true;
  sampled.seed = 7;
  const IterationTrace a = run(problem, Eigen::Vector2d(1, 2), exact_projection);
  const IterationTrace b = run(problem, Eigen::Vector2d(1, 2), sampled);
  REQUIRE(a.iterations() == b.iterations());
  for (int t = 0; t < a.iterations(); ++t)
    CHECK((a.steps[static_cast<std::size_t>(t)].x_next -
           b.steps[static_cast<std::size_t>(t)].x_next)
              .cwiseAbs()
              .maxCoeff() < 1e-13);
}

TEST_CASE("a critical point that is an eigenvector of D is flagged and fixed") {
  // at the origin of the 2-d benchmark D|X> is proportional to |X>; the
  // truncation keeps the update stationary instead of stalling the decode
  const PolynomialProblem problem = preset_f2();
  OptimizerConfig config;
  config.xi = 0.1;
  const StepResult r = iterate_once(encode(Eigen::Vector2d(0, 0)), problem, config);
  CHECK(r.trapped);
  CHECK(r.x_next.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(r.p_succ_measured ==
        doctest::Approx(std::pow(std::cos(config.eta()), 4)).epsilon(1e-12));
}

TEST_CASE("padding amplitudes stay zero through the whole protocol") {
  const PolynomialProblem problem = preset_f2();  // d+1 = 3 inside a 4-dim register
  const DressedState state = encode(Eigen::Vector2d(2, -3));
  const GradientOperator op = build_D_exact(problem, state);
  const PhaseEstimateConfig phase = PhaseEstimateConfig::from_width(6);
  StateVector sv = StateVector::from_dressed(state, phase.chi);
  apply_gradient_branch(sv, op, std::atan(std::sqrt(0.1)), phase);
  apply_gate(sv, hadamard_gate(), {sv.layout.offset(Reg::K)});
  apply_controlled_E(sv, {{sv.layout.offset(Reg::K), true},
                          {sv.layout.offset(Reg::Up), true},
                          {sv.layout.offset(Reg::D), false}});
  apply_gate(sv, hadamard_gate(), {sv.layout.offset(Reg::K)});
  double pad_weight = 0.0;
  for (std::uint64_t i = 3; i < sv.amps.size(); i += 4)  // v = 3 slice
    pad_weight += std::norm(sv.amps[i]);
  CHECK(pad_weight < 1e-20);
}

TEST_CASE("register sweep demands at least one size") {
  CHECK_THROWS_AS(
      sweep_register_sizes(preset_f2(), Eigen::Vector2d(1, 1), OptimizerConfig{}, {}),
      std::invalid_argument);
}

}  // TEST_SUITE
