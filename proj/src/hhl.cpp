#include "qgrad/hhl.hpp"

#include <cmath>
#include <stdexcept>

namespace qgrad {

PhaseEstimateConfig PhaseEstimateConfig::from_precision(int n_p, double delta) {
  if (n_p < 1) throw std::invalid_argument("hhl: n_p must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("hhl: delta must lie in (0, 1)");
  PhaseEstimateConfig config;
  config.n_p = n_p;
  config.delta = delta;
  config.chi = n_p + static_cast<int>(std::ceil(std::log2(2.0 + 1.0 / (2.0 * delta))));
  return config;
}

PhaseEstimateConfig PhaseEstimateConfig::from_width(int chi) {
  if (chi < 1) throw std::invalid_argument("hhl: chi must be >= 1");
  PhaseEstimateConfig config;
  config.chi = chi;
  config.n_p = std::max(0, chi - 2);
  config.delta = 0.25;
  return config;
}

double signed_readout(std::uint64_t j, int chi) {
  if (chi < 1 || j >= (std::uint64_t{1} << chi))
    throw std::invalid_argument("hhl: register value out of range");
  const double f = static_cast<double>(j) / static_cast<double>(std::uint64_t{1} << chi);
  return f < 0.5 ? f : f - 1.0;
}

void conditional_rotation(StateVector& state, int chi) {
  const RegisterLayout& layout = state.layout;
  if (layout.chi != chi)
    throw std::invalid_argument("hhl: chi does not match the state layout");
  const std::uint64_t nv = std::uint64_t{1} << layout.n_v;
  const std::uint64_t ne = std::uint64_t{1} << layout.chi;
  const std::uint64_t up_bit = std::uint64_t{1} << layout.offset(Reg::Up);
  const std::uint64_t d_bit = std::uint64_t{1} << layout.offset(Reg::D);
  const std::uint64_t k_bit = std::uint64_t{1} << layout.offset(Reg::K);

  for (std::uint64_t j = 0; j < ne; ++j) {
    const double lam = signed_readout(j, chi);
    const double c = lam;
    const double s = std::sqrt(1.0 - lam * lam);
    for (std::uint64_t k = 0; k < 2; ++k) {
      const std::uint64_t base = (k ? k_bit : 0) | up_bit | (j << layout.n_v);
      for (std::uint64_t v = 0; v < nv; ++v) {
        const std::uint64_t i0 = base | v;
        const std::uint64_t i1 = i0 | d_bit;
        const cx a0 = state.amps[i0];
        const cx a1 = state.amps[i1];
        state.amps[i0] = c * a0 - s * a1;
        state.amps[i1] = s * a0 + c * a1;
      }
    }
  }
}

void apply_gradient_branch(StateVector& state, const GradientOperator& op,
                           double eta, const PhaseEstimateConfig& config) {
  const RegisterLayout& layout = state.layout;
  if (layout.chi != config.chi)
    throw std::invalid_argument("hhl: state layout does not match phase config");

  apply_gate(state, real_rotation(eta), {layout.offset(Reg::Up)});
  const Eigen::Matrix2cd h = hadamard_gate();
  for (int b = 0; b < layout.chi; ++b)
    apply_gate(state, h, {layout.offset(Reg::E) + b});

  // Only the eigenvalue rotation is conditioned on register up; the
  // evolutions and transforms are uncontrolled and cancel on the |0>_up
  // branch by symmetry.
  const ControlledEvolution cud(op, config.chi);
  cud.apply(state, /*inverse=*/false);
  inverse_qft(state, Reg::E);
  conditional_rotation(state, config.chi);
  qft(state, Reg::E);
  cud.apply(state, /*inverse=*/true);
  for (int b = 0; b < layout.chi; ++b)
    apply_gate(state, h, {layout.offset(Reg::E) + b});
}

}  // namespace qgrad
