#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rmsgof/eigen.hpp"
#include "rmsgof/errors.hpp"
#include "rmsgof/quadrature.hpp"

namespace rmsgof {

// Distribution of X = sum_k sigma_k^2 Z_k^2 for independent standard normal Z_k.
//
// P(x) is the integral over t in (0, inf) of
//
//   Im[ e^{1-t} e^{i t s} / (pi (t - 1/(1 - i s)) prod_k sqrt(1 - 2(t-1) a_k + 2 i t a_k s)) ]
//
// with a_k = sigma_k^2 / x and s = sqrt(N), N the number of variances. The
// two rays leaving i in directions +-s - i replace the real-axis principal
// value integral; on them every radicand has modulus above s / sqrt(1 + s^2)
// and the integrand decays like e^{-t}.

struct QuadratureConfig {
  double t_max = 40.0;
  int low_order = 10;
  int high_order = 21;
  double abs_tol = 1e-10;
  std::size_t max_subdivisions = 2000;
  AdaptivePolicy policy = AdaptivePolicy::kGlobal;

  // Throws InputError unless t_max > 0, 2 <= low < high, abs_tol > 0.
  void validate() const;
};

struct CdfEvaluation {
  double x = 0.0;
  double p = 0.0;    // clamped to [0, 1]
  double raw = 0.0;  // quadrature sum before clamping
  std::size_t nodes_used = 0;
  double error_estimate = 0.0;
  bool budget_exceeded = false;

  double significance() const { return 1.0 - p; }
};

// The real integrand above. Requires t >= 0, x > 0 and a nonempty spectrum.
double contour_integrand(double t, double x, std::span<const double> variances);

// Reusable evaluator: validates the configuration and builds the rule once.
class ContourCdf {
 public:
  explicit ContourCdf(std::span<const double> variances, const QuadratureConfig& config = {});
  explicit ContourCdf(const VarianceSpectrum& spectrum, const QuadratureConfig& config = {})
      : ContourCdf(std::span<const double>(spectrum.variances), config) {}

  CdfEvaluation operator()(double x) const;

  const QuadratureConfig& config() const noexcept { return config_; }
  std::span<const double> variances() const noexcept { return variances_; }

 private:
  std::vector<double> variances_;
  QuadratureConfig config_;
  EmbeddedRule rule_;
};

CdfEvaluation cdf(double x, const VarianceSpectrum& spectrum, const QuadratureConfig& config = {});

// The x at which 1 - P(x) equals `significance`, by bisection on log x to
// relative width `rel_tol`. Requires 0 < significance < 1.
double x_for_significance(const ContourCdf& cdf, double significance, double rel_tol = 1e-6);

// The same CDF from the pre-shift principal value form
//
//   P(x) = 1/2 - (1/pi) int_0^inf Im[ e^{-it} / (t prod_k sqrt(1 - 2 i t sigma_k^2 / x)) ] dt,
//
// obtained by folding the +-t halves of the real line so the pole at 0 cancels.
// The slowly decaying oscillatory tail is summed over half periods and
// extrapolated with Wynn's epsilon algorithm. Intended for small spectra
// (up to ~20 terms) as an independent cross-check of ContourCdf; throws
// NumericalError (OracleDidNotConverge) when successive extrapolations disagree.
double cdf_pv_oracle(double x, std::span<const double> variances);

class OracleDidNotConverge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rmsgof
