#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace actsearch {

// splitmix64 step; used only to derive well-separated seeds for sub-streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives the seed of a named sub-stream. Chaining calls gives disjoint
// streams for (trial, environment) vs (trial, policy), per-permutation
// shuffles, and so on.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) {
  std::uint64_t state = root ^ (tag * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
  splitmix64(state);
  return splitmix64(state);
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic generator for trials. The engine is std::mt19937_64, whose
// output sequence is fixed by the standard; the samplers below avoid
// std::*_distribution, whose results differ across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n). Bias is below 2^-53 for the n used here.
  std::int64_t uniform_int(std::int64_t n) {
    assert(n > 0);
    std::int64_t v = static_cast<std::int64_t>(uniform01() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
void fisher_yates(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i)));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace actsearch
