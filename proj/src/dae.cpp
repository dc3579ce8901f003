#include "qgrad/dae.hpp"

#include <cmath>
#include <stdexcept>

namespace qgrad {

int padded_dimension(int d) {
  if (d < 1) throw std::invalid_argument("dae: variable dimension must be >= 1");
  int dim = 1;
  while (dim < d + 1) dim <<= 1;
  return dim;
}

int DressedState::n_v() const {
  int bits = 0;
  while ((1 << bits) < padded_dim()) ++bits;
  return bits;
}

DressedState encode(const Eigen::VectorXd& x) {
  if (x.size() < 1) throw std::invalid_argument("dae: cannot encode an empty point");
  if (!x.allFinite()) throw std::invalid_argument("dae: non-finite coordinate");
  DressedState state;
  state.d = static_cast<int>(x.size());
  state.cos_gamma = 1.0 / std::sqrt(1.0 + x.squaredNorm());
  state.amps = Eigen::VectorXd::Zero(padded_dimension(state.d));
  state.amps(0) = state.cos_gamma;
  state.amps.segment(1, state.d) = state.cos_gamma * x;
  return state;
}

Eigen::VectorXd decode(const DressedState& state, double trap_tolerance) {
  if (std::abs(state.amps(0)) <= trap_tolerance) {
    throw TrapStateError("dae: |0> amplitude " + std::to_string(state.amps(0)) +
                         " is below the decode tolerance");
  }
  return state.amps.segment(1, state.d) / state.amps(0);
}

double estimate_cos_gamma(const DressedState& state, std::uint64_t shots,
                          std::mt19937_64& rng) {
  if (shots == 0) throw std::invalid_argument("dae: shots must be >= 1");
  const Eigen::VectorXd probs = state.amps.cwiseAbs2();
  std::uint64_t zeros = 0;
  for (std::uint64_t s = 0; s < shots; ++s) {
    double u = uniform_unit(rng);
    int outcome = state.padded_dim() - 1;
    for (int i = 0; i < state.padded_dim(); ++i) {
      u -= probs(i);
      if (u < 0.0) {
        outcome = i;
        break;
      }
    }
    if (outcome == 0) ++zeros;
  }
  return std::sqrt(static_cast<double>(zeros) / static_cast<double>(shots));
}

}  // namespace qgrad
