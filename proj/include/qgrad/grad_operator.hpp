#pragma once

#include <Eigen/Dense>

#include "qgrad/dae.hpp"
#include "qgrad/poly_core.hpp"
#include "qgrad/state_vector.hpp"

namespace qgrad {

// The state-dependent gradient operator D = Tr_{p-1}[rho_X^{(x)p-1} M],
// embedded in the padded register dimension and prescaled so its spectrum
// stays inside (-kSpectralWindow, kSpectralWindow). The prescale folds into
// the effective learning rate.
struct GradientOperator {
  Eigen::MatrixXd matrix;       // padded, prescaled, symmetric
  double spectral_radius = 0.0; // of the operator before prescaling
  double prescale = 1.0;        // stored matrix = prescale * unscaled

  int dim() const { return static_cast<int>(matrix.rows()); }

  // Wraps a caller-supplied matrix (e.g. one with exactly representable
  // eigenphases); validates symmetry and the spectral window.
  static GradientOperator from_matrix(Eigen::MatrixXd m, double prescale = 1.0);
};

// Tr over tensor slots 2..p of (I (x) rho_X^{(x)p-1}) M on the unpadded
// (d+1)-dimensional space, before any prescaling.
Eigen::MatrixXd build_D_raw(const PolynomialProblem& problem,
                            const DressedState& state);

GradientOperator build_D_exact(const PolynomialProblem& problem,
                               const DressedState& state);

// e^{-i D t} through the Hermitian eigendecomposition.
Eigen::MatrixXcd evolution(const GradientOperator& op, double t);

// C_{U_D}: for each e-register value j, applies the unit evolution
// U^j = e^{-i 2 pi D j} to register v, so an eigenphase lambda in (-1/2, 1/2)
// is read out as j / 2^chi with the signed mapping.
class ControlledEvolution {
 public:
  ControlledEvolution(const GradientOperator& op, int chi);

  void apply(StateVector& state, bool inverse = false) const;

  // The v-register block for e-value j (for verification at small chi).
  Eigen::MatrixXcd block(std::uint64_t j, bool inverse = false) const;

  int chi() const { return chi_; }

 private:
  int chi_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

// Rounds every eigenphase of D onto the chi-bit signed grid {j/2^chi}. This
// is what the e register can store: the eigenvalue-controlled rotation sees
// the binned value, so the protocol's truncation error enters here, and the
// binned operator makes every phase exactly representable (the estimation
// register uncomputes exactly).
GradientOperator truncate_spectrum(const GradientOperator& op, int chi);

// rho_X = |X><X| on the unpadded d+1 dimensional space.
Eigen::MatrixXd density_from_state(const DressedState& state);

// One qPCA bracket: Tr_{2..p}[ e^{-i M dt} (sigma (x) rho^{(x)p-1}) e^{+i M dt} ].
Eigen::MatrixXcd qpca_step(const Eigen::MatrixXcd& sigma,
                           const Eigen::MatrixXcd& rho,
                           const Eigen::MatrixXd& M, double dt);

// m repetitions of qpca_step with dt = t/m starting from sigma = rho_X;
// approximates e^{-iDt} rho_X e^{+iDt} with error O(1/m).
Eigen::MatrixXcd qpca_evolve(const Eigen::MatrixXd& rho_X,
                             const PolynomialProblem& problem, double t, int m);

// Copy count m = 4 pi^2 p^2 max|A| / eps_pca quoted for the qPCA channel;
// reported analytically, the copies are not simulated as registers.
double qpca_copy_count(const PolynomialProblem& problem, double eps_pca);

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace qgrad
