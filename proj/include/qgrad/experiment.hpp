#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qgrad/optimizer.hpp"

namespace qgrad {

// Dense simulation above this register budget is out of desk scale.
inline constexpr int kMaxTotalQubits = 24;

// A fully resolved experiment: problem, starts, optimizer and noise settings.
struct ExperimentSpec {
  std::string label = "run";
  std::string preset;  // "f1", "f2", or empty for an inline matrix
  PolynomialProblem problem;
  std::vector<Eigen::VectorXd> starts;
  OptimizerConfig opt;
  NoiseConfig noise;
  std::string out_dir = ".";
};

// The 1-d benchmark: A = diag(7/2, -9/2) (x) diag(7/2, -9/2), p = 2.
Eigen::MatrixXd f1_raw_matrix();
// The 2-d benchmark: B = I_3 (x) I_3 + C (x) Q, p = 2.
Eigen::MatrixXd f2_raw_matrix();

PolynomialProblem preset_f1();
PolynomialProblem preset_f2();

// Full default experiment for a preset name ("f1" or "f2"): starts, learning
// rate, register width and noise settings of the reference runs.
ExperimentSpec preset_spec(const std::string& name);

// Parses and validates a config document; error messages carry the offending
// field path. Exactly one of problem.preset / problem.matrix must be given.
ExperimentSpec spec_from_json(const nlohmann::json& doc);

// Complete echo of every resolved setting (no hidden defaults).
nlohmann::json resolved_config_json(const ExperimentSpec& spec);

// CSV trace: header iter,x_0..x_{d-1},f,grad_norm,p_succ,cos_gamma, one row
// per step plus the initial point; floats with 17 significant digits.
void emit_trace(const IterationTrace& trace, const std::string& path);

// JSON summary with keys config, termination, final_x, final_f, min_p_succ,
// iterations.
void write_run_summary(const IterationTrace& trace, const nlohmann::json& config_echo,
                       const std::string& path);

// CLI entry point: run | sweep-noise | sweep-register | reproduce-f1 |
// reproduce-f2 | validate. Returns the process exit status.
int run_command(const std::vector<std::string>& args);

}  // namespace qgrad
