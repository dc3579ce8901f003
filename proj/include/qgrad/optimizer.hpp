#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qgrad/dae.hpp"
#include "qgrad/hhl.hpp"
#include "qgrad/noise.hpp"
#include "qgrad/poly_core.hpp"

namespace qgrad {

enum class Mode { ExactMatrix, Circuit };

enum class Termination { Converged, MaxIters, Trapped, ZeroBranch };

std::string to_string(Termination t);
std::string to_string(Mode m);
std::string to_string(Direction d);

struct OptimizerConfig {
  double xi = 0.1;            // learning rate, tan^2(eta)
  int max_iters = 200;
  double stop_tol = 1e-8;     // on ||x_{t+1} - x_t||
  Mode mode = Mode::ExactMatrix;
  PhaseEstimateConfig phase = PhaseEstimateConfig::from_width(12);
  std::optional<Direction> direction;  // overrides the problem's when set
  std::uint64_t seed = 0;
  bool sample_post_selection = false;  // reject-and-retry instead of exact projection

  double eta() const { return std::atan(std::sqrt(xi)); }
  // Above xi = 1/2 the closed-form success bound is no longer guaranteed.
  bool xi_exceeds_bound() const { return xi > 0.5; }
  void validate() const;
};

struct StepResult {
  Eigen::VectorXd x_next;
  double f_next = 0.0;
  double grad_norm = 0.0;      // ||grad f(x_next)||
  double p_succ_closed = 0.0;
  double p_succ_measured = 0.0;
  double cos_gamma = 0.0;      // of the updated state
  bool trapped = false;        // the pre-step state was (near) an eigenvector of D
};

struct IterationTrace {
  Eigen::VectorXd x0;
  double f0 = 0.0;
  double grad_norm0 = 0.0;
  double cos_gamma0 = 0.0;
  std::vector<StepResult> steps;
  Termination termination = Termination::MaxIters;

  const Eigen::VectorXd& final_x() const {
    return steps.empty() ? x0 : steps.back().x_next;
  }
  double final_f() const { return steps.empty() ? f0 : steps.back().f_next; }
  int iterations() const { return static_cast<int>(steps.size()); }
  double min_p_succ() const;
};

// One full Stage-1/2/3 pass: build D from the current state, apply the
// gradient branch, the k-controlled E, the closing rotation on up, and the
// |0>_k|0>_up|0>_d post-selection; then decode. In exact-matrix mode the
// update cos^2(eta)|X> +- sin^2(eta) K D |X> is formed directly.
StepResult iterate_once(const DressedState& state, const PolynomialProblem& problem,
                        const OptimizerConfig& config,
                        const NoiseConfig* noise = nullptr,
                        std::mt19937_64* rng = nullptr);

// Same step but with a caller-supplied gradient operator (noise studies and
// exact-spectrum verification).
StepResult iterate_with_operator(const DressedState& state,
                                 const PolynomialProblem& problem,
                                 const OptimizerConfig& config,
                                 const GradientOperator& op,
                                 std::mt19937_64* rng = nullptr);

// Eq.-(10) value: cos^4(eta) + sin^4(eta)|KD|X>|^2
//                 +- sin^2(eta)cos^2(eta)(<X|KD|X> + <X|DK|X>).
double success_probability_closed_form(const DressedState& state,
                                       const GradientOperator& op, double eta,
                                       Direction direction);

IterationTrace run(const PolynomialProblem& problem, const Eigen::VectorXd& x0,
                   const OptimizerConfig& config,
                   const NoiseConfig* noise = nullptr);

// One full circuit-mode run per register size in `sizes`.
std::vector<IterationTrace> sweep_register_sizes(const PolynomialProblem& problem,
                                                 const Eigen::VectorXd& x0,
                                                 const OptimizerConfig& base_config,
                                                 const std::vector<int>& sizes);

}  // namespace qgrad
