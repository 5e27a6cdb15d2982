#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace tpcgcn::tensor {

// SplitMix64: a 64-bit counter advanced by the golden-ratio increment and
// passed through a fixed avalanche finalizer. The stream depends only on the
// seed and uses integer arithmetic, so it is identical on every platform.
// Every distribution below is derived from next_u64() with explicit formulas
// (no <random> distributions, whose output is implementation-defined).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, bound), bound > 0, by rejection sampling.
  std::uint64_t uniform_index(std::uint64_t bound);
  // Standard normal via Box-Muller (one value per call, no caching).
  double normal();

  // A child stream whose seed mixes this stream's seed with `salt`.
  SeededRng derive(std::uint64_t salt) const;
  SeededRng derive(std::string_view salt) const;

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);
// FNV-1a over the bytes of `s`.
std::uint64_t fnv1a64(std::string_view s);

}  // namespace tpcgcn::tensor
