#pragma once

// Seeded randomness with a portable sequence. std::mt19937_64 output is fixed
// by the standard; the distributions in <random> are not, so bounded draws and
// shuffles are done here.

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace embedprobe {

using Rng = std::mt19937_64;

// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Reject the final partial block of 2^64 so every residue is equally likely.
  const std::uint64_t excess = (Rng::max() % n + 1) % n;
  const std::uint64_t limit = Rng::max() - excess;
  for (;;) {
    const std::uint64_t r = rng();
    if (excess == 0 || r <= limit) return r % n;
  }
}

// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

// FNV-1a, 64 bit. Stable across platforms and runs.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace embedprobe
