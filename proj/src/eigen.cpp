#include "rmsgof/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "rmsgof/errors.hpp"
#include "rmsgof/numeric.hpp"

namespace rmsgof {

double SymmetricMatrix::trace() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) sum += (*this)(i, i);
  return sum;
}

double SymmetricMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return std::sqrt(sum);
}

double SymmetricMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

SymmetricMatrix build_b(const ModelDistribution& model) {
  const std::size_t n = model.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> inv_p(n);
  for (std::size_t k = 0; k < n; ++k) inv_p[k] = 1.0 / model[k];
  const double mean_term = compensated_sum(inv_p) * inv_n * inv_n;

  SymmetricMatrix b(n);
  for (std::size_t j = 0; j < n; ++j) {
    b(j, j) = inv_p[j] - inv_n * (inv_p[j] + inv_p[j]) + mean_term;
    for (std::size_t k = j + 1; k < n; ++k) {
      const double v = -inv_n * (inv_p[j] + inv_p[k]) + mean_term;
      b(j, k) = v;
      b(k, j) = v;
    }
  }
  return b;
}

namespace {

double off_diagonal_norm(const SymmetricMatrix& a) {
  const std::size_t n = a.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum += a(i, j) * a(i, j);
  }
  return std::sqrt(2.0 * sum);
}

}  // namespace

JacobiResult jacobi_eigen(SymmetricMatrix a, const JacobiOptions& options) {
  const std::size_t n = a.size();
  JacobiResult result;
  if (options.accumulate_vectors) {
    result.eigenvectors.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) result.eigenvectors[i * n + i] = 1.0;
  }
  auto v = [&](std::size_t i, std::size_t j) -> double& { return result.eigenvectors[i * n + j]; };

  const double target = options.relative_tolerance * a.frobenius_norm();
  for (int sweep = 0;; ++sweep) {
    if (off_diagonal_norm(a) <= target) {
      result.converged = true;
      result.sweeps = sweep;
      break;
    }
    if (sweep == options.max_sweeps) {
      result.sweeps = sweep;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, tau) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double new_kp = c * akp - s * akq;
          const double new_kq = s * akp + c * akq;
          a(k, p) = new_kp;
          a(p, k) = new_kp;
          a(k, q) = new_kq;
          a(q, k) = new_kq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        if (options.accumulate_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  result.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.eigenvalues[i] = a(i, i);
  return result;
}

double VarianceSpectrum::total_variance() const { return compensated_sum(variances); }

VarianceSpectrum variance_spectrum(const SymmetricMatrix& b) {
  const std::size_t n = b.size();
  if (n < 2) throw DegenerateSpectrum("matrix must be at least 2 x 2");
  const JacobiResult eig = jacobi_eigen(b);
  if (!eig.converged) {
    throw DegenerateSpectrum("Jacobi iteration did not converge in " + std::to_string(eig.sweeps) + " sweeps");
  }

  std::vector<double> lambda = eig.eigenvalues;
  std::sort(lambda.begin(), lambda.end(),
            [](double x, double y) { return std::abs(x) < std::abs(y); });

  VarianceSpectrum out;
  out.trace = b.trace();
  out.zero_eigenvalue_residual = std::abs(lambda[0]);
  out.jacobi_sweeps = eig.sweeps;
  const double floor = kDegenerateThreshold * out.trace;
  for (std::size_t k = 1; k < n; ++k) {
    if (lambda[k] <= floor) {
      throw DegenerateSpectrum("eigenvalue " + std::to_string(lambda[k]) +
                               " is indistinguishable from the structural zero (trace " +
                               std::to_string(out.trace) + ")");
    }
  }
  out.variances.reserve(n - 1);
  for (std::size_t k = 1; k < n; ++k) out.variances.push_back(1.0 / lambda[k]);
  std::sort(out.variances.begin(), out.variances.end(), std::greater<>());
  return out;
}

VarianceSpectrum variance_spectrum(const ModelDistribution& model) {
  VarianceSpectrum out = variance_spectrum(build_b(model));
  out.precision_warning = model.dynamic_range() > kPrecisionWarningRange;
  return out;
}

VarianceSpectrum spectrum_from_variances(std::vector<double> variances) {
  if (variances.empty()) throw InputError("spectrum needs at least one variance");
  double inverse_sum = 0.0;
  for (std::size_t k = 0; k < variances.size(); ++k) {
    if (!std::isfinite(variances[k]) || variances[k] <= 0.0) {
      throw InputError("variance " + std::to_string(k + 1) + " must be positive and finite");
    }
    inverse_sum += 1.0 / variances[k];
  }
  std::sort(variances.begin(), variances.end(), std::greater<>());
  VarianceSpectrum out;
  out.variances = std::move(variances);
  out.trace = inverse_sum;
  return out;
}

}  // namespace rmsgof
