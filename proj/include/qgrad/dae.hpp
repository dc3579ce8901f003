#pragma once

#include <Eigen/Dense>
#include <random>

#include "qgrad/common.hpp"

namespace qgrad {

// Dressed amplitude encoding of a classical point x:
//   |X> = cos(gamma) (|0> + sum_i x_i |i>),   1/cos^2(gamma) = 1 + |x|^2,
// zero-padded to the next power of two so it fits a qubit register.
struct DressedState {
  Eigen::VectorXd amps;   // length 2^ceil(log2(d+1)), unit norm
  double cos_gamma = 1.0; // equals amps(0)
  int d = 0;              // logical variable dimension

  int padded_dim() const { return static_cast<int>(amps.size()); }
  int n_v() const;  // qubits spanned by the variable register
};

int padded_dimension(int d);

DressedState encode(const Eigen::VectorXd& x);

// Reverses the encoding: x_i = amps(i) / amps(0). Throws TrapStateError when
// the |0> amplitude is below trap_tolerance.
Eigen::VectorXd decode(const DressedState& state,
                       double trap_tolerance = kTrapTolerance);

// Samples the computational-basis distribution amps^2 for `shots` draws and
// returns sqrt(frequency of outcome 0). Point estimate only.
double estimate_cos_gamma(const DressedState& state, std::uint64_t shots,
                          std::mt19937_64& rng);

}  // namespace qgrad
