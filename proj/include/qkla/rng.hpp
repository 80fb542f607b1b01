#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qkla {

using Rng = std::mt19937_64;

// Mixes a master seed with a tuple of integer tags (experiment, cell, trial,
// ...) into an independent stream seed. Results are stable across platforms
// and independent of the order in which work items are scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  return Rng(derive_seed(master, tags));
}

// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exponential(1) variate; the building block for Dirichlet draws.
double standard_exponential(Rng& rng);

// Stable 64-bit hash of a string tag, for use in derive_seed.
std::uint64_t tag_hash(const char* text);

}  // namespace qkla
