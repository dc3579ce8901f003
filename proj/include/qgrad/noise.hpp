#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "qgrad/grad_operator.hpp"

namespace qgrad {

// Parameters of the three error studies: initialization perturbation,
// gradient-operator perturbation, and the e-register size sweep.
struct NoiseConfig {
  double init_amplitude = 0.0;     // relative uniform bound on x0
  double d_strength = 0.0;         // relative elementwise bound on D
  int trials = 1;
  std::vector<int> register_sizes; // n_e values for the truncation sweep
  std::uint64_t seed = 0;
  bool resample_d_each_iter = true;

  void validate() const;
};

// Each coordinate multiplied by (1 + u), u uniform in [-amplitude, amplitude].
Eigen::VectorXd perturb_initial(const Eigen::VectorXd& x0, double amplitude,
                                std::mt19937_64& rng);

// Adds a symmetric uniform perturbation with entries bounded by
// strength * max|D|, then re-checks the spectral window (re-prescaling if
// the perturbation pushed an eigenvalue outside it).
GradientOperator perturb_D(const GradientOperator& op, double strength,
                           std::mt19937_64& rng);

// Symmetric matrix with entries uniform in [-1, 1]; the frozen-perturbation
// variant draws one of these per run instead of one per iteration.
Eigen::MatrixXd draw_unit_symmetric(int dim, std::mt19937_64& rng);

GradientOperator perturb_D_with(const GradientOperator& op, double strength,
                                const Eigen::MatrixXd& unit_symmetric);

}  // namespace qgrad
