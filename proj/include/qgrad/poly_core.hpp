#pragma once

#include <Eigen/Dense>

#include "qgrad/common.hpp"

namespace qgrad {

enum class Direction { Maximize, Minimize };

// A 2p-order polynomial cost f(X) = 1/2 X^{(x) p T} A X^{(x) p} over the
// augmented variable X = (1, x^T)^T, with A stored real symmetric and
// scaled by 1/(p * max|A_ij|).
struct PolynomialProblem {
  int d = 0;                 // number of free variables
  int p = 1;                 // half-order; the polynomial has order <= 2p
  Eigen::MatrixXd A;         // (d+1)^p x (d+1)^p, symmetric, scaled
  Direction direction = Direction::Minimize;
  double scale_factor = 1.0; // divisor applied to the raw coefficients

  int side() const { return static_cast<int>(A.rows()); }

  // Wraps an already-scaled coefficient matrix; validates symmetry and the
  // side = (d+1)^p relation but leaves the caller's scaling untouched.
  static PolynomialProblem from_scaled(Eigen::MatrixXd a, int p,
                                       Direction direction = Direction::Minimize,
                                       double scale_factor = 1.0);
};

struct AugmentedPoint {
  Eigen::VectorXd X;  // (1, x^T)^T

  static AugmentedPoint from(const Eigen::VectorXd& x);
  Eigen::VectorXd variables() const { return X.tail(X.size() - 1); }
};

struct GradientPair {
  double kappa = 0.0;      // redundant first component of D_hat * X
  Eigen::VectorXd grad;    // d f / d x_i, i = 1..d
};

// Symmetrizes a raw coefficient matrix and scales it by p * max|entry|.
// Rejects non-square input, a side that is not a perfect p-th power, and
// the all-zero matrix.
PolynomialProblem symmetrize_and_scale(const Eigen::MatrixXd& a_raw, int p,
                                       Direction direction = Direction::Minimize);

// f(x) = 1/2 X^{(x)p T} A X^{(x)p} with the stored (scaled) A.
double eval_cost(const PolynomialProblem& problem, const Eigen::VectorXd& x);

// Exact gradient through the variable-dependent operator
// D_hat = (I (x) X^{(x)p-1})^T M (I (x) X^{(x)p-1}); returns D_hat * X split
// into (kappa, grad).
GradientPair classical_gradient(const PolynomialProblem& problem,
                                const Eigen::VectorXd& x);

// Central-difference gradient of eval_cost; the independent oracle.
Eigen::VectorXd finite_diff_gradient(const PolynomialProblem& problem,
                                     const Eigen::VectorXd& x,
                                     double delta = 1e-5);

// M = sum_k P_k A P_k^T with P_k swapping tensor slots 1 and k.
Eigen::MatrixXd build_M(const PolynomialProblem& problem);

// Permutation on dim^p basis states exchanging tensor slots 1 and k
// (slot 1 is the most significant digit). P_k^2 = identity.
Eigen::MatrixXd permutation_matrix(int k, int p, int dim);

// The full variable-dependent operator D_hat (side d+1); exposed so the
// quantum counterpart can be cross-checked against it.
Eigen::MatrixXd build_D_hat(const PolynomialProblem& problem,
                            const Eigen::VectorXd& x);

}  // namespace qgrad
