#include "qgrad/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "qgrad/k_truncation.hpp"

namespace qgrad {

namespace {

constexpr double kTrapFlagTol = 1e-9;

Direction resolve_direction(const PolynomialProblem& problem,
                            const OptimizerConfig& config) {
  return config.direction.value_or(problem.direction);
}

double update_sign(Direction d) { return d == Direction::Maximize ? 1.0 : -1.0; }

StepResult finish_step(const PolynomialProblem& problem, Eigen::VectorXd x_next,
                       double p_closed, double p_measured, bool trapped) {
  StepResult r;
  r.f_next = eval_cost(problem, x_next);
  r.grad_norm = classical_gradient(problem, x_next).grad.norm();
  r.cos_gamma = 1.0 / std::sqrt(1.0 + x_next.squaredNorm());
  r.x_next = std::move(x_next);
  r.p_succ_closed = p_closed;
  r.p_succ_measured = p_measured;
  r.trapped = trapped;
  return r;
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIters: return "max_iters";
    case Termination::Trapped: return "trapped";
    case Termination::ZeroBranch: return "zero_branch";
  }
  return "unknown";
}

std::string to_string(Mode m) { return m == Mode::Circuit ? "circuit" : "exact"; }

std::string to_string(Direction d) {
  return d == Direction::Maximize ? "maximize" : "minimize";
}

void OptimizerConfig::validate() const {
  if (!(xi > 0.0)) throw std::invalid_argument("optimizer: xi must be > 0");
  if (max_iters < 0) throw std::invalid_argument("optimizer: max_iters must be >= 0");
  if (!(stop_tol > 0.0)) throw std::invalid_argument("optimizer: stop_tol must be > 0");
  if (phase.chi < 1) throw std::invalid_argument("optimizer: chi must be >= 1");
}

double IterationTrace::min_p_succ() const {
  double m = 1.0;
  for (const StepResult& s : steps) m = std::min(m, s.p_succ_measured);
  return m;
}

double success_probability_closed_form(const DressedState& state,
                                       const GradientOperator& op, double eta,
                                       Direction direction) {
  if (op.dim() != state.padded_dim())
    throw std::invalid_argument("optimizer: operator/state dimension mismatch");
  Eigen::VectorXd kdx = op.matrix * state.amps;
  kdx(0) = 0.0;
  const double c2 = std::cos(eta) * std::cos(eta);
  const double s2 = std::sin(eta) * std::sin(eta);
  const double cross = 2.0 * state.amps.dot(kdx);  // <X|KD|X> + <X|DK|X>
  return c2 * c2 + s2 * s2 * kdx.squaredNorm() + update_sign(direction) * s2 * c2 * cross;
}

StepResult iterate_with_operator(const DressedState& state,
                                 const PolynomialProblem& problem,
                                 const OptimizerConfig& config,
                                 const GradientOperator& op,
                                 std::mt19937_64* rng) {
  const Direction direction = resolve_direction(problem, config);
  const double sign = update_sign(direction);
  const double eta = config.eta();
  const double c2 = std::cos(eta) * std::cos(eta);
  const double s2 = std::sin(eta) * std::sin(eta);
  const bool trapped = is_trap_state(state, op, kTrapFlagTol);
  const double p_closed = success_probability_closed_form(state, op, eta, direction);

  Eigen::VectorXd x_next;
  double p_measured = 0.0;

  if (config.mode == Mode::ExactMatrix) {
    Eigen::VectorXd kdx = op.matrix * state.amps;
    kdx(0) = 0.0;
    const Eigen::VectorXd branch = c2 * state.amps + sign * s2 * kdx;
    p_measured = branch.squaredNorm();
    if (p_measured < 1e-14)
      throw ZeroBranchError("optimizer: post-selected branch has vanishing norm");
    if (std::abs(branch(0)) <= kTrapTolerance * std::sqrt(p_measured))
      throw TrapStateError("optimizer: |0> component lost in exact update");
    x_next = branch.segment(1, problem.d) / branch(0);
  } else {
    // The e register resolves eigenphases to chi bits; the rotation acts on
    // the binned values, so the pipeline runs with the binned operator (all
    // of whose phases are exactly representable).
    const GradientOperator binned = truncate_spectrum(op, config.phase.chi);
    StateVector sv = StateVector::from_dressed(state, config.phase.chi);
    apply_gradient_branch(sv, binned, eta, config.phase);

    // Stage-3 green block: K on the gradient branch through the k ancilla.
    const int k_bit = sv.layout.offset(Reg::K);
    const Eigen::Matrix2cd h = hadamard_gate();
    apply_gate(sv, h, {k_bit});
    apply_controlled_E(sv, {{k_bit, true},
                            {sv.layout.offset(Reg::Up), true},
                            {sv.layout.offset(Reg::D), false}});
    apply_gate(sv, h, {k_bit});

    // R_x(-eta) selects the ascent combination, R_x(+eta) the descent one.
    apply_gate(sv, real_rotation(direction == Direction::Maximize ? -eta : eta),
               {sv.layout.offset(Reg::Up)});

    const std::vector<std::pair<Reg, std::uint64_t>> pattern = {
        {Reg::K, 0}, {Reg::Up, 0}, {Reg::D, 0}};
    if (config.sample_post_selection && rng) {
      // Physical reading: repeat the whole step until the selection succeeds.
      const double p = branch_probability(sv, pattern);
      int attempts = 0;
      while (uniform_unit(*rng) >= p) {
        if (++attempts > 1000000)
          throw ZeroBranchError("optimizer: post-selection never succeeded");
      }
    }
    auto [p, selected] = post_select(sv, pattern);
    p_measured = p;

    const Eigen::MatrixXcd rho_v = reduced_density_v(selected);
    const double rho00 = rho_v(0, 0).real();
    if (rho00 <= kTrapTolerance * kTrapTolerance)
      throw TrapStateError("optimizer: |0> component lost after post-selection");
    x_next.resize(problem.d);
    for (int i = 0; i < problem.d; ++i)
      x_next(i) = rho_v(i + 1, 0).real() / rho00;
  }

  return finish_step(problem, std::move(x_next), p_closed, p_measured, trapped);
}

StepResult iterate_once(const DressedState& state, const PolynomialProblem& problem,
                        const OptimizerConfig& config, const NoiseConfig* noise,
                        std::mt19937_64* rng) {
  GradientOperator op = build_D_exact(problem, state);
  if (noise && noise->d_strength > 0.0) {
    std::mt19937_64 local(noise->seed);
    std::mt19937_64& r = rng ? *rng : local;
    op = perturb_D(op, noise->d_strength, r);
  }
  return iterate_with_operator(state, problem, config, op, rng);
}

IterationTrace run(const PolynomialProblem& problem, const Eigen::VectorXd& x0,
                   const OptimizerConfig& config, const NoiseConfig* noise) {
  config.validate();
  if (noise) noise->validate();
  std::mt19937_64 rng(config.seed);

  Eigen::VectorXd x = x0;
  if (noise && noise->init_amplitude > 0.0)
    x = perturb_initial(x0, noise->init_amplitude, rng);

  // Frozen-perturbation variant: one symmetric draw reused for the whole run.
  Eigen::MatrixXd frozen;
  const bool perturb = noise && noise->d_strength > 0.0;
  if (perturb && !noise->resample_d_each_iter)
    frozen = draw_unit_symmetric(padded_dimension(problem.d), rng);

  IterationTrace trace;
  trace.x0 = x;
  trace.f0 = eval_cost(problem, x);
  trace.grad_norm0 = classical_gradient(problem, x).grad.norm();
  trace.cos_gamma0 = 1.0 / std::sqrt(1.0 + x.squaredNorm());
  trace.termination = Termination::MaxIters;

  DressedState state = encode(x);
  for (int t = 0; t < config.max_iters; ++t) {
    StepResult r;
    try {
      if (perturb) {
        GradientOperator op = build_D_exact(problem, state);
        op = noise->resample_d_each_iter
                 ? perturb_D(op, noise->d_strength, rng)
                 : perturb_D_with(op, noise->d_strength, frozen);
        r = iterate_with_operator(state, problem, config, op, &rng);
      } else {
        r = iterate_with_operator(state, problem, config,
                                  build_D_exact(problem, state), &rng);
      }
    } catch (const TrapStateError&) {
      trace.termination = Termination::Trapped;
      break;
    } catch (const ZeroBranchError&) {
      trace.termination = Termination::ZeroBranch;
      break;
    }
    const double step = (r.x_next - x).norm();
    x = r.x_next;
    state = encode(x);
    trace.steps.push_back(std::move(r));
    if (step < config.stop_tol) {
      trace.termination = Termination::Converged;
      break;
    }
  }
  return trace;
}

std::vector<IterationTrace> sweep_register_sizes(const PolynomialProblem& problem,
                                                 const Eigen::VectorXd& x0,
                                                 const OptimizerConfig& base_config,
                                                 const std::vector<int>& sizes) {
  if (sizes.empty())
    throw std::invalid_argument("optimizer: register-size sweep needs at least one size");
  std::vector<IterationTrace> traces;
  traces.reserve(sizes.size());
  for (int n_e : sizes) {
    OptimizerConfig config = base_config;
    config.mode = Mode::Circuit;
    config.phase = PhaseEstimateConfig::from_width(n_e);
    traces.push_back(run(problem, x0, config));
  }
  return traces;
}

}  // namespace qgrad
