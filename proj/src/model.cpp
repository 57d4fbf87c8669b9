#include "rmsgof/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "rmsgof/errors.hpp"
#include "rmsgof/numeric.hpp"

namespace rmsgof {

double ModelDistribution::dynamic_range() const {
  const auto [lo, hi] = std::minmax_element(probs_.begin(), probs_.end());
  return *hi / *lo;
}

ModelDistribution make_distribution(std::span<const double> weights) {
  if (weights.size() < 2) throw TooFewBins(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!std::isfinite(weights[k])) throw NotFinite(k);
    if (weights[k] <= 0.0) throw NonPositiveProbability(k, weights[k]);
  }
  std::vector<double> probs(weights.begin(), weights.end());
  const double total = compensated_sum(probs);
  if (!std::isfinite(total)) throw NotFinite(probs.size() - 1);
  // Leave already-normalized input untouched so that write/load round-trips.
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(probs.size());
  if (std::abs(total - 1.0) > slack) {
    for (double& p : probs) p /= total;
  }
  return ModelDistribution(std::move(probs));
}

std::size_t native_bin_count(Family family) {
  switch (family) {
    case Family::kTable3A: return 500;
    case Family::kTable3B: return 250;
    case Family::kTable3C: return 100;
    case Family::kTable3D: return 50;
    case Family::kTable3E: return 25;
    case Family::kTable3F: return 10;
    default: return 0;
  }
}

namespace {

bool is_table3(Family family) { return native_bin_count(family) != 0; }

double table3_weight(Family family, std::size_t bin) {
  const double k = static_cast<double>(bin);
  switch (family) {
    case Family::kTable3A: return 1.0 / ((300.0 + k) * (300.0 + k));
    case Family::kTable3B: return (260.0 - k) * (260.0 - k) * (260.0 - k);
    case Family::kTable3C: return std::pow(std::floor((40.0 + k) / 40.0), -1.0 / 6.0);
    case Family::kTable3D: return 0.5 + std::log(std::floor((61.0 - k) / 10.0));
    case Family::kTable3E: return std::exp(-5.0 * k / 8.0);
    case Family::kTable3F: return std::exp(-(k - 1.0) * (k - 1.0) / 6.0);
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

ModelDistribution generate_builtin(const BuiltinFamily& spec) {
  const std::size_t n = spec.n;
  std::vector<double> weights(n);
  if (is_table3(spec.family)) {
    if (n != native_bin_count(spec.family)) throw UnsupportedBinCount(to_string(spec), n);
    for (std::size_t k = 1; k <= n; ++k) weights[k - 1] = table3_weight(spec.family, k);
    return make_distribution(weights);
  }
  switch (spec.family) {
    case Family::kFirstExampleModel:
    case Family::kFirstExampleActual: {
      if (n < 3) throw UnsupportedBinCount(to_string(spec), n);
      const double tail = 1.0 / (2.0 * static_cast<double>(n) - 4.0);
      std::fill(weights.begin() + 2, weights.end(), tail);
      const bool actual = spec.family == Family::kFirstExampleActual;
      weights[0] = actual ? 3.0 / 8.0 : 1.0 / 4.0;
      weights[1] = actual ? 1.0 / 8.0 : 1.0 / 4.0;
      break;
    }
    case Family::kZipf:
      if (n < 2) throw UnsupportedBinCount(to_string(spec), n);
      if (!std::isfinite(spec.exponent)) throw InputError("zipf exponent must be finite");
      for (std::size_t k = 1; k <= n; ++k) {
        weights[k - 1] = std::pow(static_cast<double>(k), -spec.exponent);
      }
      break;
    default:
      throw InputError("unknown builtin family");
  }
  return make_distribution(weights);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::size_t parse_count(std::string_view text, std::string_view spec) {
  std::size_t value = 0;
  text = trim(text);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InputError("bad bin count in builtin '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

bool looks_like_builtin(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto name = spec.substr(0, colon);
  return name == "table3" || name == "ex1-model" || name == "ex1-actual" || name == "zipf" ||
         name == "uniform";
}

BuiltinFamily parse_builtin(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  std::string_view params = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

  BuiltinFamily out;
  bool have_n = false;
  bool have_letter = false;
  while (!params.empty()) {
    const auto comma = params.find(',');
    const std::string_view item = trim(params.substr(0, comma));
    params = comma == std::string_view::npos ? std::string_view{} : params.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      if (name != "table3" || have_letter || item.size() != 1 || item[0] < 'a' || item[0] > 'f') {
        throw InputError("bad builtin parameter '" + std::string(item) + "' in '" + std::string(spec) + "'");
      }
      out.family = static_cast<Family>(static_cast<int>(Family::kTable3A) + (item[0] - 'a'));
      have_letter = true;
      continue;
    }
    const auto key = trim(item.substr(0, eq));
    const auto value = item.substr(eq + 1);
    if (key == "n") {
      out.n = parse_count(value, spec);
      have_n = true;
    } else if (key == "s" && name == "zipf") {
      if (!parse_double(value, out.exponent)) {
        throw InputError("bad zipf exponent in '" + std::string(spec) + "'");
      }
    } else {
      throw InputError("unknown builtin parameter '" + std::string(key) + "' in '" + std::string(spec) + "'");
    }
  }

  if (name == "table3") {
    if (!have_letter) throw InputError("table3 needs a family letter a-f, e.g. table3:e");
    if (!have_n) out.n = native_bin_count(out.family);
  } else if (name == "ex1-model" || name == "ex1-actual") {
    out.family = name == "ex1-model" ? Family::kFirstExampleModel : Family::kFirstExampleActual;
    if (!have_n) throw InputError("'" + std::string(name) + "' needs n=<bins>");
  } else if (name == "zipf" || name == "uniform") {
    out.family = Family::kZipf;
    if (name == "uniform") out.exponent = 0.0;
    if (!have_n) throw InputError("'" + std::string(name) + "' needs n=<bins>");
  } else {
    throw InputError("unknown builtin family '" + std::string(name) + "'");
  }
  return out;
}

std::string to_string(const BuiltinFamily& family) {
  const std::string n = std::to_string(family.n);
  switch (family.family) {
    case Family::kFirstExampleModel: return "ex1-model:n=" + n;
    case Family::kFirstExampleActual: return "ex1-actual:n=" + n;
    case Family::kZipf: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "zipf:s=%.17g,n=", family.exponent);
      return buf + n;
    }
    default: {
      const char letter = static_cast<char>('a' + (static_cast<int>(family.family) - static_cast<int>(Family::kTable3A)));
      std::string out = "table3:";
      out += letter;
      if (family.n != native_bin_count(family.family)) out += ",n=" + n;
      return out;
    }
  }
}

ModelDistribution load_distribution(std::istream& in, TextFormat format) {
  std::vector<double> weights;
  std::vector<std::size_t> lines;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (!header_seen && weights.empty() && format != TextFormat::kLines) {
      std::string_view name = line;
      if (name.size() >= 2 && name.front() == '"' && name.back() == '"') name = name.substr(1, name.size() - 2);
      if (trim(name) == "p") {
        header_seen = true;
        continue;
      }
      if (format == TextFormat::kCsv) throw ParseError(line_no, "expected CSV header 'p'");
    }
    if (line.find(',') != std::string_view::npos) {
      throw ParseError(line_no, "expected a single column, got '" + std::string(line) + "'");
    }
    double value = 0.0;
    if (!parse_double(line, value)) {
      throw ParseError(line_no, "not a number: '" + std::string(line) + "'");
    }
    weights.push_back(value);
    lines.push_back(line_no);
  }
  if (in.bad()) throw ParseError(line_no, "read failure");
  try {
    return make_distribution(weights);
  } catch (const NonPositiveProbability& e) {
    throw NonPositiveProbability(e.index(), weights[e.index()], lines[e.index()]);
  } catch (const NotFinite&) {
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (!std::isfinite(weights[k])) throw ParseError(lines[k], "weight is not finite");
    }
    throw;
  }
}

ModelDistribution load_distribution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  return load_distribution(in);
}

void write_distribution(std::ostream& out, const ModelDistribution& model) {
  char buf[40];
  for (double p : model.probs()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", p);
    out << buf;
  }
}

ModelDistribution resolve_model(const std::string& source) {
  if (looks_like_builtin(source)) return generate_builtin(parse_builtin(source));
  return load_distribution_file(source);
}

}  // namespace rmsgof
