#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "qgrad/grad_operator.hpp"
#include "qgrad/state_vector.hpp"

namespace qgrad {

// E = diag(-1, 1, ..., 1); (I + E)/2 is the truncation K = diag(0, 1, ..., 1).
Eigen::MatrixXd e_gate_matrix(int dim);
Eigen::MatrixXd k_matrix(int dim);

// Flips the sign of every amplitude with register v = |0...0>, subject to the
// given controls. This is the controlled-E of the circuit's green block.
void apply_controlled_E(StateVector& state, const std::vector<ControlBit>& controls);

// K through the circuit: H on the k ancilla, C_E controlled on k, H again,
// post-selection of k = |0>. Returns the success probability (the weight of
// the non-|0> component of v) and the renormalized state.
// Throws ZeroBranchError when K annihilates the state.
std::pair<double, StateVector> apply_K_via_circuit(const StateVector& state);

// Direct projector path for cross-checking the circuit route.
std::pair<double, StateVector> apply_K_projector(const StateVector& state);

struct ElementaryGate {
  enum class Kind { X, CZ, Toffoli };
  Kind kind;
  int a = 0, b = 0, c = 0;  // X uses a; CZ uses a,b; Toffoli controls a,b target c
};

// C_E = X^{(x)n_v} C^1_{Z_a} X^{(x)n_v} decomposed into an X conjugation and
// a Toffoli ladder over n_v - 1 work ancillas. Qubit indices: 0..n_v-1 the
// v register, n_v the C_E ancilla, n_v+1.. the work ancillas.
struct TruncationGateSet {
  Eigen::MatrixXd E;
  std::vector<ElementaryGate> gates;
  int n_v = 1;
  int ancilla_count = 0;  // work ancillas beyond the C_E ancilla itself
  int toffoli_count = 0;

  int total_qubits() const { return n_v + 1 + ancilla_count; }
  // Composes the gate list into a dense matrix over all total_qubits()
  // (v lowest, then the ancilla, then the work qubits).
  Eigen::MatrixXd compose_dense() const;
};

TruncationGateSet toffoli_decompose_CE(int n_v);

// True iff |X> is an approximate eigenvector of D:
// || D|X> - <X|D|X> |X> || < tol.
bool is_trap_state(const DressedState& state, const GradientOperator& op,
                   double tol);

}  // namespace qgrad
