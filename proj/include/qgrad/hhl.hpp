#pragma once

#include "qgrad/grad_operator.hpp"
#include "qgrad/state_vector.hpp"

namespace qgrad {

// Width bookkeeping for the phase-estimation register: chi qubits store an
// eigenphase to n_p binary digits with failure probability at most delta.
struct PhaseEstimateConfig {
  int chi = 12;
  int n_p = 10;
  double delta = 0.25;

  // chi = n_p + ceil(log2(2 + 1/(2 delta)))
  static PhaseEstimateConfig from_precision(int n_p, double delta);
  // Fixes the register width directly; the guard band is accounted as 2 bits.
  static PhaseEstimateConfig from_width(int chi);

  double epsilon_p() const { return std::pow(2.0, -n_p); }
};

// Register value j read as a signed eigenphase: j/2^chi when < 1/2, else
// j/2^chi - 1. The boundary value 1/2 maps to -1/2.
double signed_readout(std::uint64_t j, int chi);

// For every e-register value j with lambda = signed_readout(j), rotates
// register d by arccos(lambda): |0>_d -> lambda |0>_d + sqrt(1-lambda^2)|1>_d,
// conditioned on register up being |1>.
void conditional_rotation(StateVector& state, int chi);

// Stage-2 pipeline: R_x(eta) on up, H on e, C_{U_D}, inverse QFT,
// eigenvalue-controlled rotation on d, QFT, C_{U_D}^-1, H on e. Up to the
// 2^{-n_p} truncation error this produces
//   cos(eta)|0>_up|0>_d|X> + sin(eta)|1>_up(|0>_d D|X> + |1>_d Dperp|X>)
// with register e returned to |0>.
void apply_gradient_branch(StateVector& state, const GradientOperator& op,
                           double eta, const PhaseEstimateConfig& config);

}  // namespace qgrad
