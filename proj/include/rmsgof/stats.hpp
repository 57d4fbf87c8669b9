#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rmsgof/model.hpp"

namespace rmsgof {

// Observed bin counts of m draws; the fractions Y_k = counts_k / m are derived.
class DrawCounts {
 public:
  DrawCounts() = default;
  // Throws InputError when the counts sum to zero.
  explicit DrawCounts(std::vector<std::uint64_t> counts);

  std::size_t size() const noexcept { return counts_.size(); }
  std::uint64_t total() const noexcept { return total_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  double fraction(std::size_t k) const {
    return static_cast<double>(counts_[k]) / static_cast<double>(total_);
  }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// One nonnegative integer per line, '#' comments allowed (same layout as model files).
DrawCounts load_counts(std::istream& in);
DrawCounts load_counts_file(const std::string& path);

// X = m sum (Y_k - p_k)^2, the squared root-mean-square statistic.
double rms_statistic(const DrawCounts& counts, const ModelDistribution& model);
// The same X as sum of the scaled deviations sqrt(m) (Y_k - p_k), squared.
double rms_statistic_from_deviations(const DrawCounts& counts, const ModelDistribution& model);

// Pearson: m sum (Y_k - p_k)^2 / p_k.
double chi2_statistic(const DrawCounts& counts, const ModelDistribution& model);

// Log-likelihood ratio: 2m sum Y_k ln(Y_k / p_k), with 0 ln 0 = 0.
double g2_statistic(const DrawCounts& counts, const ModelDistribution& model);

// Freeman-Tukey / Hellinger: 4m sum (sqrt(Y_k) - sqrt(p_k))^2.
double freeman_tukey_statistic(const DrawCounts& counts, const ModelDistribution& model);

enum class Statistic { kRms, kChi2, kG2, kFreemanTukey };

double compute_statistic(Statistic id, const DrawCounts& counts, const ModelDistribution& model);

// "rms", "chi2", "g2", "ft".
std::string_view statistic_name(Statistic id);
Statistic parse_statistic(std::string_view name);
// Comma-separated list of names.
std::vector<Statistic> parse_statistic_list(std::string_view names);

}  // namespace rmsgof
