#include "rmsgof/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rmsgof {

GaussLegendre gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  const auto n = static_cast<std::size_t>(order);
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton on P_n from the Chebyshev-like initial guesses, in long double.
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    long double x = std::cos(std::numbers::pi_v<long double> * (static_cast<long double>(i) + 0.75L) /
                             (static_cast<long double>(n) + 0.5L));
    long double derivative = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L;
      long double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / static_cast<long double>(k);
        p0 = p1;
        p1 = p2;
      }
      derivative = static_cast<long double>(n) * (x * p1 - p0) / (x * x - 1.0L);
      const long double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1.0L - x * x) * derivative * derivative);
    rule.nodes[i] = -static_cast<double>(x);
    rule.nodes[n - 1 - i] = static_cast<double>(x);
    rule.weights[i] = static_cast<double>(w);
    rule.weights[n - 1 - i] = static_cast<double>(w);
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

EmbeddedRule gauss_kronrod_10_21() {
  // QUADPACK qk21 abscissae (descending) and weights; odd indices are the Gauss nodes.
  static constexpr std::array<double, 11> xgk = {
      0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
      0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
      0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
      0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
      0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
      0.000000000000000000000000000000000};
  static constexpr std::array<double, 11> wgk = {
      0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
      0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
      0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
      0.123491976262065851077589231529160, 0.134709217311473325928054001771707,
      0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
      0.149445554002916905664936468389821};
  static constexpr std::array<double, 5> wg = {
      0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
      0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
      0.295524224714752870173892994651338};

  EmbeddedRule rule;
  rule.low_order = 10;
  rule.high_order = 21;
  for (std::size_t i = 0; i < xgk.size(); ++i) {
    const double g = (i % 2 == 1) ? wg[i / 2] : 0.0;
    rule.nodes.push_back(-xgk[i]);
    rule.high_weights.push_back(wgk[i]);
    rule.low_weights.push_back(g);
  }
  for (std::size_t i = xgk.size() - 1; i-- > 0;) {
    const double g = (i % 2 == 1) ? wg[i / 2] : 0.0;
    rule.nodes.push_back(xgk[i]);
    rule.high_weights.push_back(wgk[i]);
    rule.low_weights.push_back(g);
  }
  return rule;
}

EmbeddedRule gauss_legendre_pair(int low_order, int high_order) {
  if (low_order < 2 || high_order <= low_order) {
    throw std::invalid_argument("quadrature orders must satisfy 2 <= low < high");
  }
  const GaussLegendre low = gauss_legendre(low_order);
  const GaussLegendre high = gauss_legendre(high_order);
  EmbeddedRule rule;
  rule.low_order = low_order;
  rule.high_order = high_order;
  std::size_t i = 0;
  std::size_t j = 0;
  // Merge the two ascending node lists; a shared node (only 0) is stored once.
  while (i < low.nodes.size() || j < high.nodes.size()) {
    const bool take_low = j == high.nodes.size() || (i < low.nodes.size() && low.nodes[i] < high.nodes[j]);
    const bool shared = i < low.nodes.size() && j < high.nodes.size() && low.nodes[i] == high.nodes[j];
    if (shared) {
      rule.nodes.push_back(low.nodes[i]);
      rule.low_weights.push_back(low.weights[i++]);
      rule.high_weights.push_back(high.weights[j++]);
    } else if (take_low) {
      rule.nodes.push_back(low.nodes[i]);
      rule.low_weights.push_back(low.weights[i++]);
      rule.high_weights.push_back(0.0);
    } else {
      rule.nodes.push_back(high.nodes[j]);
      rule.low_weights.push_back(0.0);
      rule.high_weights.push_back(high.weights[j++]);
    }
  }
  return rule;
}

EmbeddedRule make_embedded_rule(int low_order, int high_order) {
  if (low_order == 10 && high_order == 21) return gauss_kronrod_10_21();
  return gauss_legendre_pair(low_order, high_order);
}

namespace {

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  double high = 0.0;   // high-order estimate of the integral over [lo, hi]
  double raw_error = 0.0;     // |high - low|
  double scaled_error = 0.0;  // QUADPACK-style estimate
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo, double hi, const EmbeddedRule& rule,
                     std::vector<double>& values) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double high = 0.0;
  double low = 0.0;
  double high_abs = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    values[k] = f(mid + half * rule.nodes[k]);
    high += rule.high_weights[k] * values[k];
    low += rule.low_weights[k] * values[k];
    high_abs += rule.high_weights[k] * std::abs(values[k]);
  }
  const double mean = 0.5 * high;
  double deviation = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) deviation += rule.high_weights[k] * std::abs(values[k] - mean);

  Panel p;
  p.lo = lo;
  p.hi = hi;
  p.high = high * half;
  p.raw_error = std::abs((high - low) * half);
  deviation *= std::abs(half);
  high_abs *= std::abs(half);
  double err = p.raw_error;
  if (deviation != 0.0 && err != 0.0) err = deviation * std::min(1.0, std::pow(200.0 * err / deviation, 1.5));
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (high_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * high_abs, err);
  p.scaled_error = err;
  return p;
}

double kahan_total(const std::vector<Panel>& panels, double Panel::*field) {
  double sum = 0.0;
  double carry = 0.0;
  for (const auto& p : panels) {
    const double y = p.*field - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

AdaptiveResult integrate_global(const std::function<double(double)>& f, double a, double b,
                                const EmbeddedRule& rule, double abs_tol, std::size_t max_subdivisions) {
  AdaptiveResult result;
  std::vector<double> values(rule.size());
  auto by_error = [](const Panel& x, const Panel& y) { return x.scaled_error < y.scaled_error; };
  std::vector<Panel> heap{evaluate_panel(f, a, b, rule, values)};
  result.nodes_used = rule.size();
  result.intervals = 1;
  double total_error = heap.front().scaled_error;
  std::size_t subdivisions = 0;
  while (total_error > abs_tol) {
    if (subdivisions >= max_subdivisions) {
      result.budget_exceeded = true;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = evaluate_panel(f, worst.lo, mid, rule, values);
    const Panel right = evaluate_panel(f, mid, worst.hi, rule, values);
    result.nodes_used += 2 * rule.size();
    result.intervals += 2;
    ++subdivisions;
    total_error += left.scaled_error + right.scaled_error - worst.scaled_error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  // Sum in position order so the result does not depend on heap layout.
  std::sort(heap.begin(), heap.end(), [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
  result.value = kahan_total(heap, &Panel::high);
  result.error_estimate = kahan_total(heap, &Panel::scaled_error);
  return result;
}

AdaptiveResult integrate_local(const std::function<double(double)>& f, double a, double b,
                               const EmbeddedRule& rule, double abs_tol, std::size_t max_subdivisions) {
  AdaptiveResult result;
  std::vector<double> values(rule.size());
  const double total_length = b - a;
  std::vector<Panel> accepted;
  std::vector<std::pair<double, double>> stack{{a, b}};
  std::size_t subdivisions = 0;
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    const Panel p = evaluate_panel(f, lo, hi, rule, values);
    result.nodes_used += rule.size();
    ++result.intervals;
    if (p.raw_error <= abs_tol * (hi - lo) / total_length) {
      accepted.push_back(p);
      continue;
    }
    if (subdivisions >= max_subdivisions) {
      result.budget_exceeded = true;
      accepted.push_back(p);
      continue;
    }
    ++subdivisions;
    const double mid = 0.5 * (lo + hi);
    // Right half first so the left half is processed next.
    stack.emplace_back(mid, hi);
    stack.emplace_back(lo, mid);
  }
  result.value = kahan_total(accepted, &Panel::high);
  result.error_estimate = kahan_total(accepted, &Panel::raw_error);
  return result;
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const EmbeddedRule& rule, double abs_tol, std::size_t max_subdivisions,
                                  AdaptivePolicy policy) {
  if (!(b > a)) return {};
  if (policy == AdaptivePolicy::kLocal) return integrate_local(f, a, b, rule, abs_tol, max_subdivisions);
  return integrate_global(f, a, b, rule, abs_tol, max_subdivisions);
}

}  // namespace rmsgof
