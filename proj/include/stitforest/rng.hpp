#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "stitforest/errors.hpp"

namespace stitforest {

// Counter-based generator: the n-th output is mix64(key + n*GAMMA), the
// SplitMix64 output function applied to an affine counter sequence.  Jumping
// to any position is O(1) and two generators with distinct keys produce
// independent-looking streams.  Streams are derived by hashing a chain of
// 64-bit ids onto the seed, so (seed, id...) fully determines every draw
// regardless of thread scheduling.
class Rng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Derives the key for a child stream: key' = mix64(key ^ mix64(id + GAMMA)).
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t key = mix64(seed + kGamma);
    for (std::uint64_t id : path) key = mix64(key ^ mix64(id + kGamma));
    return Rng(key);
  }

  Rng child(std::uint64_t id) const {
    return Rng(mix64(key_ ^ mix64(id + kGamma)));
  }

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * kGamma);
  }

  // Uniform on [0, 1): 53 high bits of the output word.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exponential with the given rate; -log1p(-u) maps u in [0,1) to (0, inf).
  double exponential(double rate) {
    if (!(rate > 0.0)) throw RateUnderflow("exponential rate must be positive");
    return -std::log1p(-uniform()) / rate;
  }

  // Box-Muller, cosine branch; consumes exactly two uniforms per call so the
  // draw count stays position-independent.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Index i with probability weights[i] / sum(weights).
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw RateUnderflow("categorical weights sum to zero");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace stitforest
