#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace stochmatch {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits, so results do not
/// depend on the standard library's distribution implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Uniform integer in [0, n). n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Counter-based seed derivation (splitmix64 chain). The same root and path
/// always give the same seed, independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t root,
                          std::initializer_list<std::uint64_t> path);

}  // namespace stochmatch
