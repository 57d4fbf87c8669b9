#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rmsgof/model.hpp"
#include "rmsgof/stats.hpp"

namespace rmsgof {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);
  // Independent stream for one simulation: the (seed, stream) pair is hashed
  // into the initial state, so results never depend on scheduling.
  static Xoshiro256 for_stream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Multinomial(m; p) by sequential conditional binomials:
// count_k ~ Binomial(remaining draws, p_k / (p_k + ... + p_n)).
class MultinomialSampler {
 public:
  explicit MultinomialSampler(const ModelDistribution& model);

  DrawCounts operator()(std::uint64_t m, Xoshiro256& rng) const;
  std::size_t size() const noexcept { return conditional_.size(); }

 private:
  std::vector<double> conditional_;  // p_k / sum_{l >= k} p_l, clamped to [0, 1]
};

DrawCounts sample_counts(const ModelDistribution& model, std::uint64_t m, Xoshiro256& rng);

}  // namespace rmsgof
