#include "rmsgof/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>

#include "rmsgof/errors.hpp"

namespace rmsgof {

DrawCounts::DrawCounts(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
  for (std::uint64_t c : counts_) total_ += c;
  if (total_ == 0) throw InputError("counts must contain at least one draw");
}

DrawCounts load_counts(std::istream& in) {
  std::vector<std::uint64_t> counts;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw ParseError(line_no, "not a nonnegative integer count: '" + std::string(line) + "'");
    }
    counts.push_back(value);
  }
  return DrawCounts(std::move(counts));
}

DrawCounts load_counts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open counts file '" + path + "'");
  return load_counts(in);
}

namespace {

void check_lengths(const DrawCounts& counts, const ModelDistribution& model) {
  if (counts.size() != model.size()) throw LengthMismatch(model.size(), counts.size());
}

}  // namespace

double rms_statistic(const DrawCounts& counts, const ModelDistribution& model) {
  check_lengths(counts, model);
  double sum = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double d = counts.fraction(k) - model[k];
    sum += d * d;
  }
  return static_cast<double>(counts.total()) * sum;
}

double rms_statistic_from_deviations(const DrawCounts& counts, const ModelDistribution& model) {
  check_lengths(counts, model);
  const double root_m = std::sqrt(static_cast<double>(counts.total()));
  double sum = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double scaled = root_m * (counts.fraction(k) - model[k]);
    sum += scaled * scaled;
  }
  return sum;
}

double chi2_statistic(const DrawCounts& counts, const ModelDistribution& model) {
  check_lengths(counts, model);
  double sum = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double d = counts.fraction(k) - model[k];
    sum += d * d / model[k];
  }
  return static_cast<double>(counts.total()) * sum;
}

double g2_statistic(const DrawCounts& counts, const ModelDistribution& model) {
  check_lengths(counts, model);
  double sum = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    if (counts.counts()[k] == 0) continue;
    const double y = counts.fraction(k);
    sum += y * std::log(y / model[k]);
  }
  // Rounding can leave a tiny negative sum when Y = p.
  return std::max(0.0, 2.0 * static_cast<double>(counts.total()) * sum);
}

double freeman_tukey_statistic(const DrawCounts& counts, const ModelDistribution& model) {
  check_lengths(counts, model);
  double sum = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double d = std::sqrt(counts.fraction(k)) - std::sqrt(model[k]);
    sum += d * d;
  }
  return 4.0 * static_cast<double>(counts.total()) * sum;
}

double compute_statistic(Statistic id, const DrawCounts& counts, const ModelDistribution& model) {
  switch (id) {
    case Statistic::kRms: return rms_statistic(counts, model);
    case Statistic::kChi2: return chi2_statistic(counts, model);
    case Statistic::kG2: return g2_statistic(counts, model);
    case Statistic::kFreemanTukey: return freeman_tukey_statistic(counts, model);
  }
  throw InputError("unknown statistic");
}

std::string_view statistic_name(Statistic id) {
  switch (id) {
    case Statistic::kRms: return "rms";
    case Statistic::kChi2: return "chi2";
    case Statistic::kG2: return "g2";
    case Statistic::kFreemanTukey: return "ft";
  }
  return "?";
}

Statistic parse_statistic(std::string_view name) {
  if (name == "rms") return Statistic::kRms;
  if (name == "chi2") return Statistic::kChi2;
  if (name == "g2") return Statistic::kG2;
  if (name == "ft") return Statistic::kFreemanTukey;
  throw InputError("unknown statistic '" + std::string(name) + "' (expected rms, chi2, g2 or ft)");
}

std::vector<Statistic> parse_statistic_list(std::string_view names) {
  std::vector<Statistic> out;
  while (true) {
    const auto comma = names.find(',');
    std::string_view item = names.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    out.push_back(parse_statistic(item));
    if (comma == std::string_view::npos) break;
    names.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace rmsgof
