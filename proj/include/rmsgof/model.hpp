#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rmsgof {

// Probabilities p_1..p_n of a discrete model over n bins.
//
// Always normalized and strictly positive; the only way to obtain one is
// through make_distribution (or the generators/loaders built on it).
class ModelDistribution {
 public:
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t k) const { return probs_[k]; }

  // max_k p_k / min_k p_k; the build error of B grows with this ratio.
  double dynamic_range() const;

  friend bool operator==(const ModelDistribution&, const ModelDistribution&) = default;

 private:
  explicit ModelDistribution(std::vector<double> probs) : probs_(std::move(probs)) {}
  friend ModelDistribution make_distribution(std::span<const double> weights);

  std::vector<double> probs_;
};

// Validates positive finite weights and divides them by their sum.
// Weights already summing to 1 to within rounding are kept bit-for-bit.
ModelDistribution make_distribution(std::span<const double> weights);

enum class Family {
  kTable3A,  // (300 + k)^-2, n = 500
  kTable3B,  // (260 - k)^3, n = 250
  kTable3C,  // floor((40 + k)/40)^(-1/6), n = 100
  kTable3D,  // 1/2 + ln floor((61 - k)/10), n = 50
  kTable3E,  // exp(-5k/8), n = 25
  kTable3F,  // exp(-(k - 1)^2/6), n = 10
  kFirstExampleModel,   // (1/4, 1/4, 1/(2n-4), ...)
  kFirstExampleActual,  // (3/8, 1/8, 1/(2n-4), ...)
  kZipf,                // k^-s
};

struct BuiltinFamily {
  Family family = Family::kTable3F;
  std::size_t n = 10;
  double exponent = 1.0;  // only used by kZipf
};

// Bin count the Table 3 families are defined for; 0 for the open-ended ones.
std::size_t native_bin_count(Family family);

ModelDistribution generate_builtin(const BuiltinFamily& family);

// Parses names such as "table3:e", "ex1-model:n=16", "ex1-actual:n=16",
// "zipf:s=1,n=100". Throws InputError on anything else.
BuiltinFamily parse_builtin(std::string_view spec);
bool looks_like_builtin(std::string_view spec);
std::string to_string(const BuiltinFamily& family);

enum class TextFormat { kAuto, kLines, kCsv };

// One weight per line, '#' starts a comment, LF or CRLF. kCsv expects a
// single column with header "p"; kAuto picks kCsv when that header is present.
ModelDistribution load_distribution(std::istream& in, TextFormat format = TextFormat::kAuto);
ModelDistribution load_distribution_file(const std::string& path);

// Writes one probability per line with enough digits to round-trip exactly.
void write_distribution(std::ostream& out, const ModelDistribution& model);

// Either a builtin name or a path to a weights file.
ModelDistribution resolve_model(const std::string& source);

}  // namespace rmsgof
