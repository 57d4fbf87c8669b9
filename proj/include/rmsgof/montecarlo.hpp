#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "rmsgof/model.hpp"
#include "rmsgof/random.hpp"
#include "rmsgof/stats.hpp"
#include "rmsgof/wsumchi2.hpp"

namespace rmsgof {

struct SimulationConfig {
  std::uint64_t seed = 1;
  std::size_t n_sims = 10000;  // 40000 for full-scale runs
  std::uint64_t m = 200;
  double confidence_threshold = 0.99;
  double success_fraction = 0.99;
  std::size_t threads = 1;  // 0 resolves through resolve_thread_count

  void validate() const;
};

// Substream namespaces, so calibration and evaluation draws never overlap.
enum class Phase : std::uint64_t { kCalibration = 0, kEvaluation = 1, kValidation = 2 };

// Simulates cfg.n_sims samples of cfg.m draws from `source` and evaluates each
// requested statistic against `model`. Result is indexed [statistic][simulation].
std::vector<std::vector<double>> simulate_statistics(const ModelDistribution& model,
                                                     const ModelDistribution& source,
                                                     std::span<const Statistic> statistics,
                                                     const SimulationConfig& cfg, Phase phase);

// Type-7 (linear interpolation between order statistics) quantile; sorts in place.
double empirical_quantile(std::vector<double>& values, double q);

// Empirical cfg.confidence_threshold quantile of the statistic under the model.
double critical_value(Statistic statistic, const ModelDistribution& model, const SimulationConfig& cfg);

// A simulated value rejects when it exceeds the critical value by more than
// this relative margin; closer values are treated as ties with it.
inline constexpr double kTieTolerance = 1e-10;
bool exceeds(double value, double critical);

struct PowerRow {
  Statistic statistic = Statistic::kRms;
  double rate = 0.0;
  double critical_value = 0.0;
  std::size_t rejections = 0;
};

struct PowerResult {
  std::vector<PowerRow> rows;
  std::size_t n_bins = 0;
  std::uint64_t m = 0;
  std::size_t n_sims = 0;
  std::uint64_t seed = 0;

  const PowerRow& row(Statistic statistic) const;
};

// Calibrates critical values on the model, then reports how often draws from
// `actual` exceed them.
PowerResult power_experiment(const ModelDistribution& model, const ModelDistribution& actual,
                             std::span<const Statistic> statistics, const SimulationConfig& cfg);

// CSV: statistic,n,m,n_sims,rate,critical_value,seed
void write_power_csv_header(std::ostream& out);
void write_power_csv(std::ostream& out, const PowerResult& result);

struct SearchBounds {
  std::uint64_t lo = 1;
  std::uint64_t hi = 4096;
};

struct DistinguishResult {
  std::uint64_t m = 0;       // smallest m found with rate >= success_fraction
  double rate = 0.0;         // rate at m
  std::uint64_t failing_m = 0;  // largest m checked with rate below target; 0 if lo already passed
  double failing_rate = 0.0;
  std::size_t evaluations = 0;
};

// Bisection over m assuming power grows with m. The bracket endpoints are
// kept as a certificate. Throws NotBracketed if the upper bound fails.
DistinguishResult distinguish_m(const ModelDistribution& model, const ModelDistribution& actual,
                                Statistic statistic, const SimulationConfig& cfg, SearchBounds bounds);

// Kolmogorov-Smirnov distance of a sorted sample to a continuous CDF. The CDF
// is evaluated at every stride-th distinct value; stride 1 is exact, larger
// strides give an upper bound using monotonicity of both functions.
double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf,
                   std::size_t stride = 1, std::size_t threads = 1);

// Simulates RMS statistics of cfg.n_sims samples of m draws from the model and
// returns their KS distance to the asymptotic CDF built from the model's spectrum.
double asymptotic_pvalue_validation(const ModelDistribution& model, std::uint64_t m,
                                    const SimulationConfig& cfg, const QuadratureConfig& quadrature = {});

// n independent draws of sum_k sigma_k^2 Z_k^2.
std::vector<double> sample_weighted_chi2(std::span<const double> variances, std::size_t count,
                                         std::uint64_t seed, std::size_t threads = 1);

}  // namespace rmsgof
