#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rmsgof/model.hpp"

namespace rmsgof {

// Dense symmetric n x n matrix, row-major.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  double trace() const;
  double frobenius_norm() const;
  double max_abs() const;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

// B = P D P, with D = diag(1/p_k) and P the projector onto the complement of
// the constant vector. Built entry-wise from the closed form, so B(j,k) and
// B(k,j) are the same double.
SymmetricMatrix build_b(const ModelDistribution& model);

struct JacobiResult {
  std::vector<double> eigenvalues;   // unsorted, in diagonal order
  std::vector<double> eigenvectors;  // column k is the eigenvector of eigenvalues[k]; empty unless requested
  int sweeps = 0;
  bool converged = false;
};

struct JacobiOptions {
  double relative_tolerance = 1e-14;  // off-diagonal Frobenius norm vs. initial Frobenius norm
  int max_sweeps = 30;
  bool accumulate_vectors = false;
};

// Cyclic-by-row Jacobi eigenvalue iteration.
JacobiResult jacobi_eigen(SymmetricMatrix a, const JacobiOptions& options = {});

// Inverses of the n-1 positive eigenvalues of B, sorted descending.
struct VarianceSpectrum {
  std::vector<double> variances;
  double zero_eigenvalue_residual = 0.0;  // |eigenvalue discarded as the structural zero|
  double trace = 0.0;                     // trace(B)
  bool precision_warning = false;         // max p / min p above kPrecisionWarningRange
  int jacobi_sweeps = 0;

  std::size_t size() const noexcept { return variances.size(); }
  double total_variance() const;  // sum of sigma_k^2, the mean of the limit law
};

inline constexpr double kPrecisionWarningRange = 1e7;
inline constexpr double kDegenerateThreshold = 1e-9;  // relative to trace(B)

// Throws DegenerateSpectrum when a second eigenvalue sits within
// kDegenerateThreshold * trace(B) of zero, or Jacobi fails to converge.
VarianceSpectrum variance_spectrum(const SymmetricMatrix& b);
VarianceSpectrum variance_spectrum(const ModelDistribution& model);

// Wraps externally known variances (tests, the CLI's raw-spectrum mode).
VarianceSpectrum spectrum_from_variances(std::vector<double> variances);

}  // namespace rmsgof
