#pragma once

#include <Eigen/Dense>
#include <random>

#include "qgrad/common.hpp"
#include "qgrad/dae.hpp"
#include "qgrad/poly_core.hpp"

namespace qgrad::testutil {

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = uniform_in(rng, -1.0, 1.0);
  return m;
}

inline Eigen::VectorXd random_vector(int n, std::mt19937_64& rng, double bound = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform_in(rng, -bound, bound);
  return v;
}

inline PolynomialProblem random_problem(int d, int p, std::mt19937_64& rng,
                                        Direction dir = Direction::Minimize) {
  int side = 1;
  for (int i = 0; i < p; ++i) side *= d + 1;
  return symmetrize_and_scale(random_matrix(side, side, rng), p, dir);
}

// Random orthogonal matrix via QR of a Gaussian-ish draw.
inline Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  const Eigen::MatrixXd m = random_matrix(n, n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

// Cost evaluated straight from the coefficient sum, independent of the
// kron-contraction path in eval_cost.
inline double brute_force_cost(const PolynomialProblem& problem,
                               const Eigen::VectorXd& x) {
  const int dim = problem.d + 1;
  const int side = problem.side();
  Eigen::VectorXd X(dim);
  X(0) = 1.0;
  X.tail(problem.d) = x;
  auto weight = [&](int index) {
    double w = 1.0;
    for (int s = 0; s < problem.p; ++s) {
      w *= X(index % dim);
      index /= dim;
    }
    return w;
  };
  double f = 0.0;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) f += weight(r) * problem.A(r, c) * weight(c);
  return 0.5 * f;
}

}  // namespace qgrad::testutil
