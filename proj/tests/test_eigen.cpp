#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rmsgof/eigen.hpp"
#include "rmsgof/errors.hpp"
#include "rmsgof/model.hpp"

using namespace rmsgof;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModelDistribution from(std::vector<double> w) { return make_distribution(w); }

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n, double decades) {
  std::uniform_real_distribution<double> u(0.0, decades);
  std::vector<double> w(n);
  for (double& x : w) x = std::pow(10.0, u(rng));
  return w;
}

const Family kTable3[] = {Family::kTable3A, Family::kTable3B, Family::kTable3C,
                          Family::kTable3D, Family::kTable3E, Family::kTable3F};

}  // namespace

TEST_CASE("build_b closed forms for two bins") {
  const auto b = build_b(from({0.5, 0.5}));
  CHECK_THAT(b(0, 0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(b(0, 1), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(b(1, 1), WithinAbs(1.0, 1e-15));

  const auto c = build_b(from({0.25, 0.75}));
  CHECK_THAT(c(0, 0), WithinRel(4.0 / 3.0, 1e-14));
  CHECK_THAT(c(1, 0), WithinRel(-4.0 / 3.0, 1e-14));
  CHECK_THAT(c(1, 1), WithinRel(4.0 / 3.0, 1e-14));
}

TEST_CASE("build_b matches P D P by explicit multiplication") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {2u, 3u, 7u, 20u}) {
    const auto model = from(random_weights(rng, n, 3.0));
    const auto b = build_b(model);
    std::vector<double> pdp(n * n, 0.0);
    auto proj = [&](std::size_t i, std::size_t j) { return (i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(n); };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += proj(i, k) * (1.0 / model[k]) * proj(k, j);
        pdp[i * n + j] = s;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(b(i, j) == b(j, i));
        CHECK_THAT(b(i, j), WithinAbs(pdp[i * n + j], 1e-12 * b.max_abs()));
      }
    }
  }
}

TEST_CASE("build_b row sums vanish and trace matches") {
  for (Family family : kTable3) {
    const auto model = generate_builtin({family, native_bin_count(family)});
    const auto b = build_b(model);
    const std::size_t n = model.size();
    double inv_sum = 0.0;
    for (double p : model.probs()) inv_sum += 1.0 / p;
    CHECK_THAT(b.trace(), WithinRel((1.0 - 1.0 / static_cast<double>(n)) * inv_sum, 1e-9));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (double v : b.row(i)) s += v;
      worst = std::max(worst, std::abs(s));
    }
    CHECK(worst <= 1e-9 * b.max_abs());
  }
}

TEST_CASE("uniform spectra") {
  const auto s4 = variance_spectrum(generate_builtin(parse_builtin("uniform:n=4")));
  REQUIRE(s4.size() == 3);
  for (double v : s4.variances) CHECK_THAT(v, WithinRel(0.25, 1e-12));
  CHECK(s4.zero_eigenvalue_residual <= 1e-12);

  for (std::size_t n : {2u, 5u, 10u, 50u, 200u}) {
    const auto s = variance_spectrum(generate_builtin({Family::kZipf, n, 0.0}));
    REQUIRE(s.size() == n - 1);
    for (double v : s.variances) CHECK_THAT(v, WithinRel(1.0 / static_cast<double>(n), 1e-12));
  }
}

TEST_CASE("two-bin spectrum closed form") {
  const auto s = variance_spectrum(from({0.25, 0.75}));
  REQUIRE(s.size() == 1);
  CHECK_THAT(s.variances[0], WithinRel(0.375, 1e-14));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int i = 0; i < 50; ++i) {
    const double p = u(rng);
    const auto si = variance_spectrum(from({p, 1.0 - p}));
    CHECK_THAT(si.variances[0], WithinRel(2.0 * p * (1.0 - p), 1e-12));
  }
}

TEST_CASE("Table 3 spectrum invariants") {
  for (Family family : kTable3) {
    const auto model = generate_builtin({family, native_bin_count(family)});
    const auto s = variance_spectrum(model);
    const std::size_t n = model.size();
    REQUIRE(s.size() == n - 1);
    CHECK(std::is_sorted(s.variances.rbegin(), s.variances.rend()));
    for (double v : s.variances) CHECK(v > 0.0);
    CHECK(s.zero_eigenvalue_residual <= 1e-9 * s.trace);
    double inv_sum = 0.0;
    for (double p : model.probs()) inv_sum += 1.0 / p;
    double inv_var = 0.0;
    for (double v : s.variances) inv_var += 1.0 / v;
    CHECK_THAT(inv_var, WithinRel((1.0 - 1.0 / static_cast<double>(n)) * inv_sum, 1e-8));
    CHECK_FALSE(s.precision_warning);
  }
}

TEST_CASE("Jacobi eigenvectors are orthogonal and diagonalize B") {
  std::mt19937_64 rng(21);
  for (std::size_t n : {3u, 10u, 25u, 50u}) {
    const auto b = build_b(from(random_weights(rng, n, 2.0)));
    const auto r = jacobi_eigen(b, {.accumulate_vectors = true});
    REQUIRE(r.converged);
    REQUIRE(r.eigenvectors.size() == n * n);
    auto v = [&](std::size_t i, std::size_t k) { return r.eigenvectors[i * n + k]; };
    double worst_orth = 0.0;
    double worst_resid = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l < n; ++l) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += v(i, k) * v(i, l);
        worst_orth = std::max(worst_orth, std::abs(dot - (k == l ? 1.0 : 0.0)));
      }
      for (std::size_t i = 0; i < n; ++i) {
        double bv = 0.0;
        for (std::size_t j = 0; j < n; ++j) bv += b(i, j) * v(j, k);
        worst_resid = std::max(worst_resid, std::abs(bv - r.eigenvalues[k] * v(i, k)));
      }
    }
    CHECK(worst_orth <= 1e-12);
    CHECK(worst_resid <= 1e-11 * b.frobenius_norm());
  }
}

TEST_CASE("Jacobi agrees with characteristic-polynomial roots for small n") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
    const auto b = build_b(from(random_weights(rng, n, 1.5)));
    std::vector<std::vector<double>> dense(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dense[i][j] = b(i, j);
    }
    auto roots = oracle::characteristic_roots(dense);
    std::sort(roots.begin(), roots.end(), [](double a, double c) { return std::abs(a) < std::abs(c); });
    roots.erase(roots.begin());
    std::vector<double> expected;
    for (double r : roots) expected.push_back(1.0 / r);
    std::sort(expected.rbegin(), expected.rend());

    const auto s = variance_spectrum(b);
    REQUIRE(s.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
      CHECK_THAT(s.variances[k], WithinRel(expected[k], 1e-8));
    }
  }
}

TEST_CASE("precision warning and degenerate spectra") {
  const auto wide = variance_spectrum(from({1.0, 1e-8, 1.0}));
  CHECK(wide.precision_warning);

  SymmetricMatrix zero(3);
  CHECK_THROWS_AS(variance_spectrum(zero), DegenerateSpectrum);
  SymmetricMatrix two_zeros(3);
  two_zeros(0, 0) = 1.0;
  CHECK_THROWS_AS(variance_spectrum(two_zeros), DegenerateSpectrum);

  const auto s = spectrum_from_variances({0.5, 2.0, 1.0});
  CHECK(s.variances == std::vector<double>{2.0, 1.0, 0.5});
  CHECK_THAT(s.trace, WithinRel(3.5, 1e-15));
  CHECK_THAT(s.total_variance(), WithinRel(3.5, 1e-15));
  CHECK_THROWS_AS(spectrum_from_variances({}), InputError);
  CHECK_THROWS_AS(spectrum_from_variances({1.0, -1.0}), InputError);
}
