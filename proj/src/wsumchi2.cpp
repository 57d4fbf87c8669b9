#include "rmsgof/wsumchi2.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "rmsgof/errors.hpp"

namespace rmsgof {

void QuadratureConfig::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InputError("t_max must be positive");
  if (low_order < 2 || high_order <= low_order) {
    throw InputError("quadrature orders must satisfy 2 <= low < high");
  }
  if (!(abs_tol > 0.0)) throw InputError("abs_tol must be positive");
}

double contour_integrand(double t, double x, std::span<const double> variances) {
  const double s = std::sqrt(static_cast<double>(variances.size()));

  // Running product of the radicands as mantissa * 2^exponent. Every radicand
  // has positive imaginary part, so its principal argument lies in (0, pi) and
  // the running argument can pass the negative real axis at most once per
  // factor; winding counts those passes. The principal square roots then
  // multiply to |prod|^{1/2} exp(i (arg prod + 2 pi winding) / 2).
  double re = 1.0;
  double im = 0.0;
  long exponent = 0;
  long winding = 0;
  for (double variance : variances) {
    const double a = variance / x;
    const double r_re = 1.0 - 2.0 * (t - 1.0) * a;
    const double r_im = 2.0 * t * a * s;
    const double next_re = re * r_re - im * r_im;
    const double next_im = re * r_im + im * r_re;
    if (im >= 0.0 && next_im < 0.0) ++winding;
    re = next_re;
    im = next_im;
    const double scale = std::max(std::abs(re), std::abs(im));
    if (scale > 0x1p+400 || scale < 0x1p-400) {
      int e = 0;
      std::frexp(scale, &e);
      re = std::ldexp(re, -e);
      im = std::ldexp(im, -e);
      exponent += e;
    }
  }
  const double log_modulus = std::log(std::hypot(re, im)) + static_cast<double>(exponent) * std::numbers::ln2;
  const double argument = std::atan2(im, re) + 2.0 * std::numbers::pi * static_cast<double>(winding);

  // e^{1-t} e^{its} / prod sqrt(r_k), as one complex exponential.
  const double magnitude = std::exp((1.0 - t) - 0.5 * log_modulus);
  const double phase = t * s - 0.5 * argument;
  const std::complex<double> numerator = std::polar(magnitude, phase);
  const std::complex<double> pole = 1.0 / std::complex<double>(1.0, -s);
  return std::imag(numerator / (std::numbers::pi * (t - pole)));
}

ContourCdf::ContourCdf(std::span<const double> variances, const QuadratureConfig& config)
    : variances_(variances.begin(), variances.end()), config_(config) {
  config_.validate();
  if (variances_.empty()) throw InputError("spectrum needs at least one variance");
  for (double v : variances_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("variances must be positive and finite");
  }
  rule_ = make_embedded_rule(config_.low_order, config_.high_order);
}

CdfEvaluation ContourCdf::operator()(double x) const {
  CdfEvaluation out;
  out.x = x;
  if (!(x > 0.0)) return out;
  if (std::isinf(x)) {
    out.p = out.raw = 1.0;
    return out;
  }
  const auto integrand = [&](double t) { return contour_integrand(t, x, variances_); };
  const AdaptiveResult q =
      integrate_adaptive(integrand, 0.0, config_.t_max, rule_, config_.abs_tol,
                         config_.max_subdivisions, config_.policy);
  out.raw = q.value;
  out.p = std::clamp(q.value, 0.0, 1.0);
  out.nodes_used = q.nodes_used;
  out.error_estimate = q.error_estimate;
  out.budget_exceeded = q.budget_exceeded;
  return out;
}

CdfEvaluation cdf(double x, const VarianceSpectrum& spectrum, const QuadratureConfig& config) {
  return ContourCdf(spectrum, config)(x);
}

double x_for_significance(const ContourCdf& cdf, double significance, double rel_tol) {
  if (!(significance > 0.0 && significance < 1.0)) throw InputError("significance must lie in (0, 1)");
  double mean = 0.0;
  for (double v : cdf.variances()) mean += v;
  const auto above = [&](double x) { return cdf(x).significance() > significance; };
  double lo = mean;
  double hi = mean;
  while (!above(lo) && lo > 1e-300) lo *= 0.5;
  while (above(hi) && hi < 1e300) hi *= 2.0;
  while (hi / lo > 1.0 + rel_tol) {
    const double mid = std::sqrt(lo * hi);
    (above(mid) ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace rmsgof
