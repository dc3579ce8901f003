#include "qgrad/poly_core.hpp"

#include <cmath>
#include <stdexcept>

namespace qgrad {

namespace {

// Integer b with b^p == side, or -1 if none exists.
int integer_root(long side, int p) {
  for (long b = 1;; ++b) {
    long v = 1;
    for (int i = 0; i < p; ++i) {
      v *= b;
      if (v > side) break;
    }
    if (v == side) return static_cast<int>(b);
    if (v > side || b > side) return -1;
  }
}

void check_dimension(const PolynomialProblem& problem, const Eigen::VectorXd& x) {
  if (x.size() != problem.d) {
    throw std::invalid_argument("poly_core: x has length " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(problem.d));
  }
}

// X^{(x) n} as a column vector, slot 1 most significant.
Eigen::VectorXd kron_power(const Eigen::VectorXd& X, int n) {
  Eigen::VectorXd out = Eigen::VectorXd::Ones(1);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd next(out.size() * X.size());
    for (Eigen::Index a = 0; a < out.size(); ++a)
      next.segment(a * X.size(), X.size()) = out(a) * X;
    out.swap(next);
  }
  return out;
}

// W = I_{d+1} (x) X^{(x) p-1}: contracts the trailing p-1 tensor slots.
Eigen::MatrixXd contraction_map(const Eigen::VectorXd& X, int p) {
  const int dim = static_cast<int>(X.size());
  const Eigen::VectorXd tail = kron_power(X, p - 1);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(dim * tail.size(), dim);
  for (int j = 0; j < dim; ++j)
    W.block(j * tail.size(), j, tail.size(), 1) = tail;
  return W;
}

}  // namespace

PolynomialProblem PolynomialProblem::from_scaled(Eigen::MatrixXd a, int p,
                                                 Direction direction,
                                                 double scale_factor) {
  if (p < 1) throw std::invalid_argument("poly_core: p must be >= 1");
  if (a.rows() != a.cols())
    throw std::invalid_argument("poly_core: coefficient matrix is not square");
  const int base = integer_root(a.rows(), p);
  if (base < 2)
    throw std::invalid_argument("poly_core: matrix side is not a perfect p-th power >= 2^p");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("poly_core: coefficient matrix is not symmetric");
  PolynomialProblem problem;
  problem.d = base - 1;
  problem.p = p;
  problem.A = std::move(a);
  problem.direction = direction;
  problem.scale_factor = scale_factor;
  return problem;
}

AugmentedPoint AugmentedPoint::from(const Eigen::VectorXd& x) {
  AugmentedPoint point;
  point.X.resize(x.size() + 1);
  point.X(0) = 1.0;
  point.X.tail(x.size()) = x;
  return point;
}

PolynomialProblem symmetrize_and_scale(const Eigen::MatrixXd& a_raw, int p,
                                       Direction direction) {
  if (p < 1) throw std::invalid_argument("poly_core: p must be >= 1");
  if (a_raw.rows() != a_raw.cols())
    throw std::invalid_argument("poly_core: coefficient matrix is not square");
  const int base = integer_root(a_raw.rows(), p);
  if (base < 2)
    throw std::invalid_argument("poly_core: matrix side is not a perfect p-th power >= 2^p");
  Eigen::MatrixXd sym = 0.5 * (a_raw + a_raw.transpose());
  const double max_norm = sym.cwiseAbs().maxCoeff();
  if (max_norm == 0.0)
    throw std::invalid_argument("poly_core: all-zero coefficient matrix, scale undefined");
  const double scale = p * max_norm;
  return PolynomialProblem::from_scaled(sym / scale, p, direction, scale);
}

double eval_cost(const PolynomialProblem& problem, const Eigen::VectorXd& x) {
  check_dimension(problem, x);
  const Eigen::VectorXd Xp = kron_power(AugmentedPoint::from(x).X, problem.p);
  return 0.5 * Xp.dot(problem.A * Xp);
}

Eigen::MatrixXd build_D_hat(const PolynomialProblem& problem,
                            const Eigen::VectorXd& x) {
  check_dimension(problem, x);
  const Eigen::VectorXd X = AugmentedPoint::from(x).X;
  const Eigen::MatrixXd W = contraction_map(X, problem.p);
  return W.transpose() * build_M(problem) * W;
}

GradientPair classical_gradient(const PolynomialProblem& problem,
                                const Eigen::VectorXd& x) {
  const Eigen::VectorXd X = AugmentedPoint::from(x).X;
  const Eigen::VectorXd v = build_D_hat(problem, x) * X;
  GradientPair pair;
  pair.kappa = v(0);
  pair.grad = v.tail(problem.d);
  return pair;
}

Eigen::VectorXd finite_diff_gradient(const PolynomialProblem& problem,
                                     const Eigen::VectorXd& x, double delta) {
  check_dimension(problem, x);
  if (!(delta > 0.0))
    throw std::invalid_argument("poly_core: finite-difference delta must be > 0");
  Eigen::VectorXd grad(problem.d);
  Eigen::VectorXd probe = x;
  for (int i = 0; i < problem.d; ++i) {
    probe(i) = x(i) + 0.5 * delta;
    const double hi = eval_cost(problem, probe);
    probe(i) = x(i) - 0.5 * delta;
    const double lo = eval_cost(problem, probe);
    probe(i) = x(i);
    grad(i) = (hi - lo) / delta;
  }
  return grad;
}

Eigen::MatrixXd build_M(const PolynomialProblem& problem) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(problem.side(), problem.side());
  for (int k = 1; k <= problem.p; ++k) {
    const Eigen::MatrixXd P = permutation_matrix(k, problem.p, problem.d + 1);
    M += P * problem.A * P.transpose();
  }
  return M;
}

Eigen::MatrixXd permutation_matrix(int k, int p, int dim) {
  if (k < 1 || k > p)
    throw std::invalid_argument("poly_core: permutation index k out of [1, p]");
  long n = 1;
  for (int i = 0; i < p; ++i) n *= dim;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> digits(p);
  for (long idx = 0; idx < n; ++idx) {
    long t = idx;
    for (int s = p - 1; s >= 0; --s) {
      digits[s] = static_cast<int>(t % dim);
      t /= dim;
    }
    std::swap(digits[0], digits[k - 1]);
    long out = 0;
    for (int s = 0; s < p; ++s) out = out * dim + digits[s];
    P(out, idx) = 1.0;
  }
  return P;
}

}  // namespace qgrad
