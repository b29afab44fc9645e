#pragma once

// Shared numeric conventions: the +infinity sentinel used for divergent
// divergences, seed derivation for reproducible random streams, and a
// value-with-error pair for numerical oracles.

#include <cstdint>
#include <limits>
#include <random>

namespace relbo {

/// Sentinel returned by divergence routines whose value diverges.
/// Sweeps record the sentinel instead of aborting.
inline constexpr double infinity() {
  return std::numeric_limits<double>::infinity();
}

inline bool is_divergent(double v) {
  return v == std::numeric_limits<double>::infinity();
}

/// A numerically estimated value together with an error estimate.
struct ValueWithError {
  double value = 0.0;
  double error = 0.0;
};

/// Derives an independent stream seed from a master seed, so concurrent
/// tasks driven by one configuration stay deterministic.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream) {
  return std::mt19937_64(derive_seed(master, stream));
}

}  // namespace relbo
