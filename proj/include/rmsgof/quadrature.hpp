#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rmsgof {

struct GaussLegendre {
  std::vector<double> nodes;    // ascending on [-1, 1]
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int order);

// A pair of rules sharing one node set on [-1, 1]. low_weights is zero on
// nodes the low-order rule does not use (and likewise high_weights).
struct EmbeddedRule {
  int low_order = 0;
  int high_order = 0;
  std::vector<double> nodes;
  std::vector<double> high_weights;
  std::vector<double> low_weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

// 10-point Gauss embedded in the 21-point Kronrod extension.
EmbeddedRule gauss_kronrod_10_21();

// Two independent Gauss-Legendre rules on the union of their nodes.
EmbeddedRule gauss_legendre_pair(int low_order, int high_order);

// Kronrod pair for (10, 21), independent Gauss-Legendre pair otherwise.
EmbeddedRule make_embedded_rule(int low_order, int high_order);

enum class AdaptivePolicy {
  // Repeatedly bisect the interval with the largest error estimate until the
  // estimates sum to at most abs_tol. The per-interval estimate is the
  // QUADPACK scaling of |high - low| against the interval's mean deviation.
  kGlobal,
  // Recursive bisection; an interval of length h is accepted when
  // |high - low| <= abs_tol * h / (b - a).
  kLocal,
};

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;  // sum of the policy's estimates over the final partition
  std::size_t nodes_used = 0;
  std::size_t intervals = 0;    // evaluated, including rejected ones
  bool budget_exceeded = false;  // max_subdivisions bisections did not reach abs_tol
};

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const EmbeddedRule& rule, double abs_tol,
                                  std::size_t max_subdivisions,
                                  AdaptivePolicy policy = AdaptivePolicy::kGlobal);

}  // namespace rmsgof
