#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "qgrad/common.hpp"
#include "qgrad/dae.hpp"

namespace qgrad {

enum class Reg { K, Up, D, E, V };

// Bit layout of the five protocol registers. Register v holds the variable
// amplitudes in the least-significant bits, e the eigenvalue storage above
// it, then the three single-qubit ancillas d, up, k.
struct RegisterLayout {
  int chi = 1;  // width of register e
  int n_v = 1;  // width of register v

  int width(Reg r) const {
    switch (r) {
      case Reg::E: return chi;
      case Reg::V: return n_v;
      default: return 1;
    }
  }
  int offset(Reg r) const {
    switch (r) {
      case Reg::V: return 0;
      case Reg::E: return n_v;
      case Reg::D: return n_v + chi;
      case Reg::Up: return n_v + chi + 1;
      case Reg::K: return n_v + chi + 2;
    }
    return 0;
  }
  int total_qubits() const { return n_v + chi + 3; }
  std::uint64_t dim() const { return std::uint64_t{1} << total_qubits(); }
  std::uint64_t mask(Reg r) const {
    return ((std::uint64_t{1} << width(r)) - 1) << offset(r);
  }
  std::uint64_t value_of(Reg r, std::uint64_t index) const {
    return (index & mask(r)) >> offset(r);
  }
};

struct ControlBit {
  int bit = 0;
  bool positive = true;  // false = open circle, triggers on |0>
};

struct StateVector {
  RegisterLayout layout;
  std::vector<cx> amps;

  static StateVector zero_state(const RegisterLayout& layout);

  // |0...0> on k, up, d, e and the dressed amplitudes on v.
  static StateVector from_dressed(const DressedState& state, int chi);

  double norm() const;
};

// Applies a 2x2 (one target) or 4x4 (two targets, targets[0] low bit) unitary
// under an optional list of positive/negative controls.
void apply_gate(StateVector& state, const Eigen::MatrixXcd& gate,
                const std::vector<int>& targets,
                const std::vector<ControlBit>& controls = {});

// Dense unitary on a whole named register.
void apply_register_unitary(StateVector& state, const Eigen::MatrixXcd& unitary,
                            Reg reg);

// Register-level discrete Fourier transforms:
//   inverse_qft maps (1/sqrt(N)) sum_j e^{-2 pi i j k / N} |j>  to  |k>,
//   qft is its inverse.
void qft(StateVector& state, Reg reg);
void inverse_qft(StateVector& state, Reg reg);

// Projects onto the given register values, returning the branch probability
// and the renormalized state. Throws ZeroBranchError when the branch norm
// is below 1e-14.
std::pair<double, StateVector> post_select(
    const StateVector& state, const std::vector<std::pair<Reg, std::uint64_t>>& pattern);

// Probability of observing the given register values (no collapse).
double branch_probability(const StateVector& state,
                          const std::vector<std::pair<Reg, std::uint64_t>>& pattern);

// Reduced density matrix of register v (rows/cols over the padded dimension).
Eigen::MatrixXcd reduced_density_v(const StateVector& state);

// Debug text dump: "index real imag" per line. Not a stability contract.
void dump(const StateVector& state, std::ostream& os);

// Real rotation |0> -> cos(eta)|0> + sin(eta)|1>, |1> -> -sin(eta)|0> + cos(eta)|1>.
// This is the rotation convention used throughout the protocol circuit; the
// eigenvalue-controlled step requires real coefficients (cos, sin) with no
// relative phase, so the -i-phase Pauli convention is not used.
Eigen::Matrix2cd real_rotation(double eta);

Eigen::Matrix2cd hadamard_gate();

}  // namespace qgrad
