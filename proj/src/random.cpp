#include "rmsgof/random.hpp"

#include <algorithm>
#include <random>

#include "rmsgof/errors.hpp"

namespace rmsgof {

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

Xoshiro256 Xoshiro256::for_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t a = seed;
  std::uint64_t b = stream ^ 0x5851f42d4c957f2dULL;
  const std::uint64_t mixed = splitmix64(a) ^ (splitmix64(b) * 0xd1342543de82ef95ULL);
  return Xoshiro256(mixed);
}

MultinomialSampler::MultinomialSampler(const ModelDistribution& model) : conditional_(model.size()) {
  const auto p = model.probs();
  double tail = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) {
    tail += p[k];
    conditional_[k] = std::clamp(p[k] / tail, 0.0, 1.0);
  }
  conditional_.back() = 1.0;
}

DrawCounts MultinomialSampler::operator()(std::uint64_t m, Xoshiro256& rng) const {
  if (m == 0) throw InputError("number of draws must be positive");
  std::vector<std::uint64_t> counts(conditional_.size(), 0);
  std::uint64_t remaining = m;
  for (std::size_t k = 0; k + 1 < conditional_.size() && remaining > 0; ++k) {
    std::binomial_distribution<std::uint64_t> binomial(remaining, conditional_[k]);
    const std::uint64_t c = binomial(rng);
    counts[k] = c;
    remaining -= c;
  }
  counts.back() += remaining;
  return DrawCounts(std::move(counts));
}

DrawCounts sample_counts(const ModelDistribution& model, std::uint64_t m, Xoshiro256& rng) {
  return MultinomialSampler(model)(m, rng);
}

}  // namespace rmsgof
