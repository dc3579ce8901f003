#include "qgrad/state_vector.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace qgrad {

namespace {

void require_unitary(const Eigen::MatrixXcd& u, double tol, const char* what) {
  if (u.rows() != u.cols()) throw std::invalid_argument(std::string(what) + ": not square");
  const Eigen::MatrixXcd residual =
      u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  if (residual.cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument(std::string(what) + ": matrix is not unitary");
}

void require_distinct_bits(const StateVector& state, const std::vector<int>& bits) {
  const int total = state.layout.total_qubits();
  std::uint64_t seen = 0;
  for (int b : bits) {
    if (b < 0 || b >= total)
      throw std::invalid_argument("sv_engine: bit index out of range");
    const std::uint64_t m = std::uint64_t{1} << b;
    if (seen & m) throw std::invalid_argument("sv_engine: overlapping bit indices");
    seen |= m;
  }
}

bool controls_satisfied(std::uint64_t index, const std::vector<ControlBit>& controls) {
  for (const ControlBit& c : controls) {
    const bool set = (index >> c.bit) & 1;
    if (set != c.positive) return false;
  }
  return true;
}

// In-place radix-2 transform over a gathered register axis.
// sign = -1: forward DFT (out_k = 1/sqrt(N) sum_j e^{-2 pi i jk/N} in_j),
// sign = +1: the inverse.
void fft_axis(std::vector<cx>& buf, int sign) {
  const std::size_t n = buf.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {  // bit reversal
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(buf[i], buf[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const cx wl(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      cx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cx u = buf[i + j];
        const cx v = buf[i + j + len / 2] * w;
        buf[i + j] = u + v;
        buf[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (cx& a : buf) a *= scale;
}

void fourier_on_register(StateVector& state, Reg reg, int sign) {
  const RegisterLayout& layout = state.layout;
  const int off = layout.offset(reg);
  const std::uint64_t n = std::uint64_t{1} << layout.width(reg);
  const std::uint64_t lo_count = std::uint64_t{1} << off;
  const std::uint64_t hi_count = layout.dim() >> (off + layout.width(reg));
  std::vector<cx> buf(n);
  for (std::uint64_t hi = 0; hi < hi_count; ++hi) {
    const std::uint64_t base_hi = hi << (off + layout.width(reg));
    for (std::uint64_t lo = 0; lo < lo_count; ++lo) {
      const std::uint64_t base = base_hi | lo;
      for (std::uint64_t r = 0; r < n; ++r) buf[r] = state.amps[base | (r << off)];
      fft_axis(buf, sign);
      for (std::uint64_t r = 0; r < n; ++r) state.amps[base | (r << off)] = buf[r];
    }
  }
}

}  // namespace

StateVector StateVector::zero_state(const RegisterLayout& layout) {
  StateVector state;
  state.layout = layout;
  state.amps.assign(layout.dim(), cx(0.0, 0.0));
  state.amps[0] = cx(1.0, 0.0);
  return state;
}

StateVector StateVector::from_dressed(const DressedState& dressed, int chi) {
  RegisterLayout layout;
  layout.chi = chi;
  layout.n_v = dressed.n_v();
  StateVector state = zero_state(layout);
  for (int i = 0; i < dressed.padded_dim(); ++i)
    state.amps[static_cast<std::uint64_t>(i)] = cx(dressed.amps(i), 0.0);
  return state;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const cx& a : amps) s += std::norm(a);
  return std::sqrt(s);
}

void apply_gate(StateVector& state, const Eigen::MatrixXcd& gate,
                const std::vector<int>& targets,
                const std::vector<ControlBit>& controls) {
  std::vector<int> bits = targets;
  for (const ControlBit& c : controls) bits.push_back(c.bit);
  require_distinct_bits(state, bits);
  if (targets.size() == 1) {
    if (gate.rows() != 2) throw std::invalid_argument("sv_engine: expected a 2x2 gate");
    require_unitary(gate, 1e-12, "sv_engine");
    const std::uint64_t t = std::uint64_t{1} << targets[0];
    const cx g00 = gate(0, 0), g01 = gate(0, 1), g10 = gate(1, 0), g11 = gate(1, 1);
    for (std::uint64_t i = 0; i < state.amps.size(); ++i) {
      if (i & t) continue;
      if (!controls_satisfied(i, controls)) continue;
      const cx a0 = state.amps[i];
      const cx a1 = state.amps[i | t];
      state.amps[i] = g00 * a0 + g01 * a1;
      state.amps[i | t] = g10 * a0 + g11 * a1;
    }
  } else if (targets.size() == 2) {
    if (gate.rows() != 4) throw std::invalid_argument("sv_engine: expected a 4x4 gate");
    require_unitary(gate, 1e-12, "sv_engine");
    const std::uint64_t t0 = std::uint64_t{1} << targets[0];  // low bit of the pair
    const std::uint64_t t1 = std::uint64_t{1} << targets[1];
    for (std::uint64_t i = 0; i < state.amps.size(); ++i) {
      if (i & (t0 | t1)) continue;
      if (!controls_satisfied(i, controls)) continue;
      cx a[4] = {state.amps[i], state.amps[i | t0], state.amps[i | t1],
                 state.amps[i | t0 | t1]};
      for (int r = 0; r < 4; ++r) {
        cx acc(0.0, 0.0);
        for (int c = 0; c < 4; ++c) acc += gate(r, c) * a[c];
        state.amps[i | (r & 1 ? t0 : 0) | (r & 2 ? t1 : 0)] = acc;
      }
    }
  } else {
    throw std::invalid_argument("sv_engine: apply_gate supports 1 or 2 targets");
  }
}

void apply_register_unitary(StateVector& state, const Eigen::MatrixXcd& unitary,
                            Reg reg) {
  const RegisterLayout& layout = state.layout;
  const std::uint64_t n = std::uint64_t{1} << layout.width(reg);
  if (static_cast<std::uint64_t>(unitary.rows()) != n)
    throw std::invalid_argument("sv_engine: unitary side does not match register width");
  require_unitary(unitary, 1e-10, "sv_engine");
  const int off = layout.offset(reg);
  const std::uint64_t lo_count = std::uint64_t{1} << off;
  const std::uint64_t hi_count = layout.dim() >> (off + layout.width(reg));
  Eigen::VectorXcd buf(n), out(n);
  for (std::uint64_t hi = 0; hi < hi_count; ++hi) {
    const std::uint64_t base_hi = hi << (off + layout.width(reg));
    for (std::uint64_t lo = 0; lo < lo_count; ++lo) {
      const std::uint64_t base = base_hi | lo;
      for (std::uint64_t r = 0; r < n; ++r) buf(r) = state.amps[base | (r << off)];
      out.noalias() = unitary * buf;
      for (std::uint64_t r = 0; r < n; ++r) state.amps[base | (r << off)] = out(r);
    }
  }
}

void qft(StateVector& state, Reg reg) { fourier_on_register(state, reg, -1); }

void inverse_qft(StateVector& state, Reg reg) { fourier_on_register(state, reg, +1); }

double branch_probability(const StateVector& state,
                          const std::vector<std::pair<Reg, std::uint64_t>>& pattern) {
  std::uint64_t mask = 0, want = 0;
  for (const auto& [reg, value] : pattern) {
    const std::uint64_t m = state.layout.mask(reg);
    if (mask & m) throw std::invalid_argument("sv_engine: pattern registers overlap");
    mask |= m;
    want |= value << state.layout.offset(reg);
  }
  double p = 0.0;
  for (std::uint64_t i = 0; i < state.amps.size(); ++i)
    if ((i & mask) == want) p += std::norm(state.amps[i]);
  return p;
}

std::pair<double, StateVector> post_select(
    const StateVector& state, const std::vector<std::pair<Reg, std::uint64_t>>& pattern) {
  const double p = branch_probability(state, pattern);
  if (p < 1e-14)
    throw ZeroBranchError("sv_engine: selected branch has vanishing norm");
  std::uint64_t mask = 0, want = 0;
  for (const auto& [reg, value] : pattern) {
    mask |= state.layout.mask(reg);
    want |= value << state.layout.offset(reg);
  }
  StateVector out = state;
  const double inv = 1.0 / std::sqrt(p);
  for (std::uint64_t i = 0; i < out.amps.size(); ++i)
    out.amps[i] = ((i & mask) == want) ? out.amps[i] * inv : cx(0.0, 0.0);
  return {p, out};
}

Eigen::MatrixXcd reduced_density_v(const StateVector& state) {
  const std::uint64_t nv = std::uint64_t{1} << state.layout.n_v;
  const std::uint64_t rest = state.layout.dim() >> state.layout.n_v;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(nv, nv);
  for (std::uint64_t r = 0; r < rest; ++r) {
    const std::uint64_t base = r << state.layout.n_v;
    for (std::uint64_t i = 0; i < nv; ++i) {
      const cx ai = state.amps[base | i];
      if (ai == cx(0.0, 0.0)) continue;
      for (std::uint64_t j = 0; j < nv; ++j)
        rho(i, j) += ai * std::conj(state.amps[base | j]);
    }
  }
  return rho;
}

void dump(const StateVector& state, std::ostream& os) {
  for (std::uint64_t i = 0; i < state.amps.size(); ++i)
    os << i << ' ' << state.amps[i].real() << ' ' << state.amps[i].imag() << '\n';
}

Eigen::Matrix2cd real_rotation(double eta) {
  Eigen::Matrix2cd r;
  r << std::cos(eta), -std::sin(eta), std::sin(eta), std::cos(eta);
  return r;
}

Eigen::Matrix2cd hadamard_gate() {
  Eigen::Matrix2cd h;
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

}  // namespace qgrad
