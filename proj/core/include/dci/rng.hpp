#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dci {

// mt19937_64 output is pinned by the standard; the standard *distributions*
// are not. Every sampling helper here draws from the raw engine so results
// are identical across compilers.

/// Uniform integer in [0, n). n must be > 0. Rejection sampling, no modulo
/// bias.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Uniform double in [0, 1) with 53 bits of randomness.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

/// Fisher-Yates shuffle driven by uniform_below.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

/// k distinct indices drawn uniformly from [0, n), returned in ascending
/// order. Selection sampling (Knuth 3.4.2 S): one pass, deterministic.
inline std::vector<std::uint64_t> sample_indices(std::mt19937_64& rng,
                                                 std::uint64_t n,
                                                 std::uint64_t k) {
  std::vector<std::uint64_t> out;
  out.reserve(k);
  std::uint64_t remaining = n;
  std::uint64_t needed = k;
  for (std::uint64_t i = 0; i < n && needed > 0; ++i) {
    if (uniform_below(rng, remaining) < needed) {
      out.push_back(i);
      --needed;
    }
    --remaining;
  }
  return out;
}

/// FNV-1a 64-bit checksum; used wherever an artifact records a content hash.
inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace dci
