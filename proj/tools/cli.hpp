#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rmsgof::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kDegenerate = 3,
  kBudgetExceeded = 4,
};

// Runs one command line. CSV goes to `out` (or the --out file), diagnostics
// and the JSON run manifest to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Grid specs: lin:a:b:N, log:a:b:N, or auto:N[:sig] for N points evenly
// spaced on (0, x] where 1 - P(x) = sig (default 1e-9).
struct GridSpec {
  enum class Kind { kLinear, kLog, kAuto } kind = Kind::kAuto;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 100;
  double tail_significance = 1e-9;
};

GridSpec parse_grid(const std::string& spec);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace rmsgof::cli
