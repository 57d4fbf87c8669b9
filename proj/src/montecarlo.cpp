#include "rmsgof/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "rmsgof/eigen.hpp"
#include "rmsgof/errors.hpp"
#include "rmsgof/parallel.hpp"

namespace rmsgof {

void SimulationConfig::validate() const {
  if (n_sims < 1) throw InputError("number of simulations must be at least 1");
  if (m < 1) throw InputError("number of draws must be at least 1");
  if (!(confidence_threshold > 0.0 && confidence_threshold < 1.0)) {
    throw InputError("confidence threshold must lie in (0, 1)");
  }
  if (!(success_fraction > 0.0 && success_fraction < 1.0)) {
    throw InputError("success fraction must lie in (0, 1)");
  }
}

namespace {

std::uint64_t stream_id(Phase phase, std::size_t sim) {
  return (static_cast<std::uint64_t>(phase) << 48) ^ static_cast<std::uint64_t>(sim);
}

}  // namespace

std::vector<std::vector<double>> simulate_statistics(const ModelDistribution& model,
                                                     const ModelDistribution& source,
                                                     std::span<const Statistic> statistics,
                                                     const SimulationConfig& cfg, Phase phase) {
  cfg.validate();
  if (model.size() != source.size()) throw LengthMismatch(model.size(), source.size());
  const MultinomialSampler sampler(source);
  std::vector<std::vector<double>> out(statistics.size(), std::vector<double>(cfg.n_sims));
  parallel_for(cfg.n_sims, resolve_thread_count(cfg.threads), [&](std::size_t i) {
    Xoshiro256 rng = Xoshiro256::for_stream(cfg.seed, stream_id(phase, i));
    const DrawCounts counts = sampler(cfg.m, rng);
    for (std::size_t s = 0; s < statistics.size(); ++s) {
      out[s][i] = compute_statistic(statistics[s], counts, model);
    }
  });
  return out;
}

double empirical_quantile(std::vector<double>& values, double q) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

double critical_value(Statistic statistic, const ModelDistribution& model, const SimulationConfig& cfg) {
  const Statistic ids[] = {statistic};
  auto sims = simulate_statistics(model, model, ids, cfg, Phase::kCalibration);
  return empirical_quantile(sims[0], cfg.confidence_threshold);
}

bool exceeds(double value, double critical) {
  return value > critical + kTieTolerance * std::max(1.0, std::abs(critical));
}

const PowerRow& PowerResult::row(Statistic statistic) const {
  for (const auto& r : rows) {
    if (r.statistic == statistic) return r;
  }
  throw InputError("statistic " + std::string(statistic_name(statistic)) + " not in result");
}

PowerResult power_experiment(const ModelDistribution& model, const ModelDistribution& actual,
                             std::span<const Statistic> statistics, const SimulationConfig& cfg) {
  if (model.size() != actual.size()) throw LengthMismatch(model.size(), actual.size());
  auto calibration = simulate_statistics(model, model, statistics, cfg, Phase::kCalibration);
  const auto evaluation = simulate_statistics(model, actual, statistics, cfg, Phase::kEvaluation);

  PowerResult result;
  result.n_bins = model.size();
  result.m = cfg.m;
  result.n_sims = cfg.n_sims;
  result.seed = cfg.seed;
  for (std::size_t s = 0; s < statistics.size(); ++s) {
    PowerRow row;
    row.statistic = statistics[s];
    row.critical_value = empirical_quantile(calibration[s], cfg.confidence_threshold);
    row.rejections = static_cast<std::size_t>(
        std::count_if(evaluation[s].begin(), evaluation[s].end(),
                      [&](double v) { return exceeds(v, row.critical_value); }));
    row.rate = static_cast<double>(row.rejections) / static_cast<double>(cfg.n_sims);
    result.rows.push_back(row);
  }
  return result;
}

void write_power_csv_header(std::ostream& out) { out << "statistic,n,m,n_sims,rate,critical_value,seed\n"; }

void write_power_csv(std::ostream& out, const PowerResult& result) {
  char buf[256];
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%llu,%zu,%.12g,%.17g,%llu\n",
                  std::string(statistic_name(row.statistic)).c_str(), result.n_bins,
                  static_cast<unsigned long long>(result.m), result.n_sims, row.rate, row.critical_value,
                  static_cast<unsigned long long>(result.seed));
    out << buf;
  }
}

DistinguishResult distinguish_m(const ModelDistribution& model, const ModelDistribution& actual,
                                Statistic statistic, const SimulationConfig& cfg, SearchBounds bounds) {
  if (model.size() != actual.size()) throw LengthMismatch(model.size(), actual.size());
  if (bounds.lo < 1 || bounds.hi < bounds.lo) throw InputError("search bounds must satisfy 1 <= lo <= hi");
  const Statistic ids[] = {statistic};
  DistinguishResult out;
  auto rate_at = [&](std::uint64_t m) {
    SimulationConfig at = cfg;
    at.m = m;
    ++out.evaluations;
    return power_experiment(model, actual, ids, at).rows[0].rate;
  };

  const double hi_rate = rate_at(bounds.hi);
  if (hi_rate < cfg.success_fraction) {
    throw NotBracketed("rate " + std::to_string(hi_rate) + " at m = " + std::to_string(bounds.hi) +
                       " is below the target " + std::to_string(cfg.success_fraction));
  }
  std::uint64_t hi = bounds.hi;
  double rate_hi = hi_rate;
  std::uint64_t lo = bounds.lo;
  const double lo_rate = rate_at(lo);
  if (lo_rate >= cfg.success_fraction) {
    out.m = lo;
    out.rate = lo_rate;
    return out;
  }
  double rate_lo = lo_rate;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    const double r = rate_at(mid);
    if (r >= cfg.success_fraction) {
      hi = mid;
      rate_hi = r;
    } else {
      lo = mid;
      rate_lo = r;
    }
  }
  out.m = hi;
  out.rate = rate_hi;
  out.failing_m = lo;
  out.failing_rate = rate_lo;
  return out;
}

double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf,
                   std::size_t stride, std::size_t threads) {
  if (sorted.empty()) throw InputError("KS distance of an empty sample");
  if (stride < 1) stride = 1;
  // Distinct values and the count of sample points <= each.
  std::vector<double> values;
  std::vector<std::size_t> at_most;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    values.push_back(sorted[i]);
    at_most.push_back(i + 1);
  }
  const std::size_t d = values.size();
  std::vector<std::size_t> probes;
  for (std::size_t j = 0; j < d; j += stride) probes.push_back(j);
  if (probes.back() != d - 1) probes.push_back(d - 1);

  std::vector<double> f(probes.size());
  parallel_for(probes.size(), resolve_thread_count(threads),
               [&](std::size_t i) { f[i] = cdf(values[probes[i]]); });

  const double n = static_cast<double>(sorted.size());
  auto below = [&](std::size_t j) { return j == 0 ? 0.0 : static_cast<double>(at_most[j - 1]) / n; };
  auto upto = [&](std::size_t j) { return static_cast<double>(at_most[j]) / n; };
  double distance = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const std::size_t j = probes[i];
    distance = std::max({distance, f[i] - below(j), upto(j) - f[i]});
    if (i + 1 < probes.size() && probes[i + 1] > j + 1) {
      const std::size_t b = probes[i + 1];
      distance = std::max({distance, f[i + 1] - upto(j), below(b) - f[i]});
    }
  }
  return distance;
}

double asymptotic_pvalue_validation(const ModelDistribution& model, std::uint64_t m,
                                    const SimulationConfig& cfg, const QuadratureConfig& quadrature) {
  SimulationConfig at = cfg;
  at.m = m;
  const Statistic ids[] = {Statistic::kRms};
  auto sims = simulate_statistics(model, model, ids, at, Phase::kValidation);
  std::sort(sims[0].begin(), sims[0].end());
  const ContourCdf asymptotic(variance_spectrum(model), quadrature);
  return ks_distance(sims[0], [&](double x) { return asymptotic(x).p; }, 1, cfg.threads);
}

std::vector<double> sample_weighted_chi2(std::span<const double> variances, std::size_t count,
                                         std::uint64_t seed, std::size_t threads) {
  constexpr std::size_t kBlock = 4096;
  std::vector<double> out(count);
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, resolve_thread_count(threads), [&](std::size_t block) {
    Xoshiro256 rng = Xoshiro256::for_stream(seed, block);
    std::normal_distribution<double> normal;
    const std::size_t end = std::min(count, (block + 1) * kBlock);
    for (std::size_t i = block * kBlock; i < end; ++i) {
      double sum = 0.0;
      for (double v : variances) {
        const double z = normal(rng);
        sum += v * z * z;
      }
      out[i] = sum;
    }
  });
  return out;
}

}  // namespace rmsgof
