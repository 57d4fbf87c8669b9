#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "rmsgof/errors.hpp"
#include "rmsgof/quadrature.hpp"
#include "rmsgof/wsumchi2.hpp"

namespace rmsgof {

namespace {

constexpr double kPi = std::numbers::pi;

// Im[e^{-it} / (t prod sqrt(1 - 2 i t b_k))], the +-t folded principal value integrand.
double folded_integrand(double t, std::span<const double> b) {
  std::complex<double> denominator(1.0, 0.0);
  for (double bk : b) denominator *= std::sqrt(std::complex<double>(1.0, -2.0 * t * bk));
  return std::imag(std::polar(1.0, -t) / denominator) / t;
}

double panel(double lo, double hi, std::span<const double> b, const GaussLegendre& rule) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    sum += rule.weights[k] * folded_integrand(mid + half * rule.nodes[k], b);
  }
  return half * sum;
}

// Wynn epsilon extrapolation of the partial sums; returns the even-column
// entry whose change from its column predecessor is smallest.
double wynn_epsilon(std::span<const double> sums, double& change) {
  const std::size_t n = sums.size();
  std::vector<double> previous(n + 1, 0.0);  // column k - 1
  std::vector<double> current(sums.begin(), sums.end());
  double best = sums.back();
  change = std::abs(sums[n - 1] - sums[n - 2]);
  for (std::size_t column = 1; current.size() > 1; ++column) {
    std::vector<double> next(current.size() - 1);
    for (std::size_t j = 0; j + 1 < current.size(); ++j) {
      const double diff = current[j + 1] - current[j];
      if (diff == 0.0) {
        change = 0.0;
        return column % 2 == 1 ? current[j + 1] : best;
      }
      next[j] = previous[j + 1] + 1.0 / diff;
    }
    previous = std::move(current);
    current = std::move(next);
    if (column % 2 == 0 && current.size() >= 2) {
      const double delta = std::abs(current.back() - current[current.size() - 2]);
      if (delta < change) {
        change = delta;
        best = current.back();
      }
    }
  }
  return best;
}

}  // namespace

double cdf_pv_oracle(double x, std::span<const double> variances) {
  if (!(x > 0.0)) return 0.0;
  if (variances.empty()) throw InputError("spectrum needs at least one variance");
  std::vector<double> b;
  b.reserve(variances.size());
  for (double v : variances) b.push_back(v / x);

  const GaussLegendre rule = gauss_legendre(24);

  // First half period on geometrically shrinking panels toward t = 0, where
  // the folded integrand has the finite limit sum(b) - 1.
  double head = 0.0;
  for (int j = 90; j >= 0; --j) {
    head += panel(std::ldexp(kPi, -j - 1), std::ldexp(kPi, -j), b, rule);
  }

  constexpr std::size_t kWindow = 24;
  constexpr std::size_t kMaxPanels = std::size_t{1} << 19;
  std::vector<double> partial{head};
  partial.reserve(1024);
  double previous_estimate = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t checkpoint = 128; checkpoint <= kMaxPanels; checkpoint *= 2) {
    while (partial.size() < checkpoint) {
      const double j = static_cast<double>(partial.size());
      partial.push_back(partial.back() + panel(j * kPi, (j + 1.0) * kPi, b, rule));
    }
    double change = 0.0;
    const double estimate =
        wynn_epsilon(std::span<const double>(partial).last(kWindow), change);
    if (std::abs(estimate - previous_estimate) <= 1e-11 && change <= 1e-11) {
      return 0.5 - estimate / kPi;
    }
    previous_estimate = estimate;
  }
  throw OracleDidNotConverge("principal value oracle did not converge for x = " + std::to_string(x));
}

}  // namespace rmsgof
