#include "qgrad/noise.hpp"

#include <stdexcept>

namespace qgrad {

void NoiseConfig::validate() const {
  if (init_amplitude < 0.0 || d_strength < 0.0)
    throw std::invalid_argument("noise: perturbation bounds must be >= 0");
  if (trials < 1) throw std::invalid_argument("noise: trials must be >= 1");
}

Eigen::VectorXd perturb_initial(const Eigen::VectorXd& x0, double amplitude,
                                std::mt19937_64& rng) {
  if (amplitude < 0.0)
    throw std::invalid_argument("noise: perturbation amplitude must be >= 0");
  Eigen::VectorXd out = x0;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) *= 1.0 + uniform_in(rng, -amplitude, amplitude);
  return out;
}

Eigen::MatrixXd draw_unit_symmetric(int dim, std::mt19937_64& rng) {
  Eigen::MatrixXd r(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const double u = uniform_in(rng, -1.0, 1.0);
      r(i, j) = u;
      r(j, i) = u;
    }
  return r;
}

GradientOperator perturb_D_with(const GradientOperator& op, double strength,
                                const Eigen::MatrixXd& unit_symmetric) {
  if (strength < 0.0)
    throw std::invalid_argument("noise: perturbation strength must be >= 0");
  if (strength == 0.0) return op;
  const double bound = strength * op.matrix.cwiseAbs().maxCoeff();
  Eigen::MatrixXd perturbed = op.matrix + bound * unit_symmetric;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(perturbed, Eigen::EigenvaluesOnly);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  const double clamp = radius > kSpectralWindow ? kSpectralWindow / radius : 1.0;
  GradientOperator out;
  out.matrix = clamp * perturbed;
  out.prescale = op.prescale * clamp;
  out.spectral_radius = radius / op.prescale;
  return out;
}

GradientOperator perturb_D(const GradientOperator& op, double strength,
                           std::mt19937_64& rng) {
  if (strength == 0.0) return op;
  return perturb_D_with(op, strength, draw_unit_symmetric(op.dim(), rng));
}

}  // namespace qgrad
