#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qgrad {

using cx = std::complex<double>;

// Eigenvalues of the gradient operator are kept inside
// (-1/2 + margin, 1/2 - margin) so the signed phase readout never wraps.
inline constexpr double kSpectralMargin = 1.0 / 32.0;
inline constexpr double kSpectralWindow = 0.5 - kSpectralMargin;

// |0>-amplitude below this cannot be divided out when reversing the encoding.
inline constexpr double kTrapTolerance = 1e-9;

// The |0> component of the current state vanished; the augmented first
// coordinate cannot be recovered.
struct TrapStateError : std::runtime_error {
  explicit TrapStateError(const std::string& what) : std::runtime_error(what) {}
};

// A projective selection hit a branch of (near) zero norm.
struct ZeroBranchError : std::runtime_error {
  explicit ZeroBranchError(const std::string& what) : std::runtime_error(what) {}
};

// Uniform double in [0, 1) from the top 53 bits of the engine output.
// Pinned bit-for-bit so traces are reproducible independent of the
// standard library's distribution implementations.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// splitmix64 step; used to derive independent per-trial seeds from a master.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qgrad
