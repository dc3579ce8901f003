#include "qgrad/k_truncation.hpp"

#include <cmath>
#include <stdexcept>

namespace qgrad {

Eigen::MatrixXd e_gate_matrix(int dim) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(dim, dim);
  e(0, 0) = -1.0;
  return e;
}

Eigen::MatrixXd k_matrix(int dim) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(dim, dim);
  k(0, 0) = 0.0;
  return k;
}

void apply_controlled_E(StateVector& state, const std::vector<ControlBit>& controls) {
  const std::uint64_t v_mask = state.layout.mask(Reg::V);
  std::uint64_t on_mask = 0, off_mask = 0;
  for (const ControlBit& c : controls) {
    const std::uint64_t m = std::uint64_t{1} << c.bit;
    if (m & v_mask)
      throw std::invalid_argument("k_truncation: control inside register v");
    (c.positive ? on_mask : off_mask) |= m;
  }
  for (std::uint64_t i = 0; i < state.amps.size(); ++i) {
    if (i & v_mask) continue;               // E only flips v = |0...0>
    if ((i & on_mask) != on_mask) continue;
    if (i & off_mask) continue;
    state.amps[i] = -state.amps[i];
  }
}

std::pair<double, StateVector> apply_K_via_circuit(const StateVector& state) {
  const int k_bit = state.layout.offset(Reg::K);
  StateVector work = state;
  const Eigen::Matrix2cd h = hadamard_gate();
  apply_gate(work, h, {k_bit});
  apply_controlled_E(work, {{k_bit, true}});
  apply_gate(work, h, {k_bit});
  auto [p, selected] = post_select(work, {{Reg::K, 0}});
  return {p, std::move(selected)};
}

std::pair<double, StateVector> apply_K_projector(const StateVector& state) {
  const std::uint64_t v_mask = state.layout.mask(Reg::V);
  StateVector out = state;
  double kept = 0.0;
  for (std::uint64_t i = 0; i < out.amps.size(); ++i) {
    if ((i & v_mask) == 0)
      out.amps[i] = cx(0.0, 0.0);
    else
      kept += std::norm(out.amps[i]);
  }
  if (kept < 1e-14)
    throw ZeroBranchError("k_truncation: K annihilates the state (trap configuration)");
  const double inv = 1.0 / std::sqrt(kept);
  for (cx& a : out.amps) a *= inv;
  return {kept, out};
}

namespace {

Eigen::MatrixXd gate_as_dense(const ElementaryGate& g, int total) {
  const long dim = 1L << total;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (long i = 0; i < dim; ++i) {
    switch (g.kind) {
      case ElementaryGate::Kind::X:
        m(i ^ (1L << g.a), i) = 1.0;
        break;
      case ElementaryGate::Kind::CZ: {
        const bool both = ((i >> g.a) & 1) && ((i >> g.b) & 1);
        m(i, i) = both ? -1.0 : 1.0;
        break;
      }
      case ElementaryGate::Kind::Toffoli: {
        const bool fire = ((i >> g.a) & 1) && ((i >> g.b) & 1);
        m(fire ? i ^ (1L << g.c) : i, i) = 1.0;
        break;
      }
    }
  }
  return m;
}

}  // namespace

Eigen::MatrixXd TruncationGateSet::compose_dense() const {
  const int total = total_qubits();
  const long dim = 1L << total;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
  for (const ElementaryGate& g : gates) m = gate_as_dense(g, total) * m;
  return m;
}

TruncationGateSet toffoli_decompose_CE(int n_v) {
  if (n_v < 1) throw std::invalid_argument("k_truncation: n_v must be >= 1");
  TruncationGateSet set;
  set.n_v = n_v;
  set.E = e_gate_matrix(1 << n_v);
  set.ancilla_count = n_v - 1;
  const int a = n_v;        // the C_E ancilla
  const int work0 = n_v + 1;

  using Kind = ElementaryGate::Kind;
  for (int q = 0; q < n_v; ++q) set.gates.push_back({Kind::X, q});
  if (n_v == 1) {
    set.gates.push_back({Kind::CZ, 0, a});
  } else {
    std::vector<ElementaryGate> ladder;
    ladder.push_back({Kind::Toffoli, 0, 1, work0});
    for (int q = 2; q < n_v; ++q)
      ladder.push_back({Kind::Toffoli, work0 + q - 2, q, work0 + q - 1});
    for (const auto& g : ladder) set.gates.push_back(g);
    set.gates.push_back({Kind::CZ, work0 + n_v - 2, a});
    for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) set.gates.push_back(*it);
    set.toffoli_count = 2 * static_cast<int>(ladder.size());
  }
  for (int q = 0; q < n_v; ++q) set.gates.push_back({Kind::X, q});
  return set;
}

bool is_trap_state(const DressedState& state, const GradientOperator& op,
                   double tol) {
  if (op.dim() != state.padded_dim())
    throw std::invalid_argument("k_truncation: operator/state dimension mismatch");
  const Eigen::VectorXd dx = op.matrix * state.amps;
  const double overlap = state.amps.dot(dx);
  return (dx - overlap * state.amps).norm() < tol;
}

}  // namespace qgrad
