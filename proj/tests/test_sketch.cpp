#include <cmath>

#include <doctest.h>

#include "skridge/data_matrix.hpp"
#include "skridge/errors.hpp"
#include "skridge/factorize.hpp"
#include "skridge/kernels.hpp"
#include "skridge/random.hpp"
#include "skridge/sketch.hpp"
#include "support/oracles.hpp"

using namespace skridge;

namespace {

/// d x n matrix with prescribed singular values (uniformly random factors).
DenseMatrix matrix_with_spectrum(std::size_t d, std::size_t n, const Vector& sigma,
                                 std::uint64_t seed) {
  DenseMatrix u = orthonormalize(gaussian_matrix(d, sigma.size(), seed));
  DenseMatrix v = orthonormalize(gaussian_matrix(n, sigma.size(), seed + 1));
  DenseMatrix scaled(n, sigma.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    Vector col(v.col(j).begin(), v.col(j).end());
    kernels::scal(sigma[j], col);
    scaled.set_col(j, col);
  }
  DenseMatrix x;
  kernels::dense_mul_mat(u, scaled.transposed(), x);
  return x;
}

DenseMatrix sketch_reconstruction(const SketchedSvd& sv) {
  DenseMatrix recon(sv.left.rows(), sv.right.rows());
  for (std::size_t j = 0; j < recon.cols(); ++j) {
    auto col = recon.col(j);
    for (std::size_t t = 0; t < sv.k; ++t) {
      const double coef = sv.singular_values[t] * sv.right(j, t);
      kernels::axpy(coef, sv.left.col(t), col);
    }
  }
  return recon;
}

}  // namespace

TEST_SUITE("sketch") {

TEST_CASE("krylov_block with one iteration spans A Pi") {
  DataMatrix a(DenseMatrix::diagonal({3.0, 2.0, 1.0, 0.5}));
  DenseMatrix pi = gaussian_matrix(4, 2, 5);
  DenseMatrix q = krylov_block(a, pi, 1);
  REQUIRE(q.cols() == 2);
  // Projecting A Pi onto span(Q) must reproduce it.
  DenseMatrix block0 = a.mul_mat(pi);
  DenseMatrix coef;
  kernels::dense_tmul_mat(q, block0, coef);
  DenseMatrix back;
  kernels::dense_mul_mat(q, coef, back);
  CHECK(oracles::frobenius_diff(back, block0) < 1e-10);
}

TEST_CASE("krylov_block returns an orthonormal basis") {
  DataMatrix a(gaussian_matrix(50, 80, 2));
  DenseMatrix pi = gaussian_matrix(80, 4, 3);
  DenseMatrix q = krylov_block(a, pi, 3);
  DenseMatrix g;
  kernels::dense_tmul_mat(q, q, g);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.cols(); ++j)
    for (std::size_t i = 0; i < g.rows(); ++i) {
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-8);
}

TEST_CASE("krylov_block collapses to the matrix rank") {
  // Rank-2 matrix: q = 3 blocks of width 2 still give exactly 2 columns.
  DenseMatrix x = matrix_with_spectrum(12, 20, {2.0, 1.0}, 7);
  DataMatrix a(x);
  DenseMatrix pi = gaussian_matrix(20, 2, 8);
  DenseMatrix q = krylov_block(a, pi, 3);
  CHECK(q.cols() == 2);
}

TEST_CASE("krylov_block rejects mismatched shapes") {
  DataMatrix a(gaussian_matrix(6, 9, 1));
  CHECK_THROWS_AS(krylov_block(a, gaussian_matrix(8, 2, 2), 2), DimensionError);
}

TEST_CASE("block_lanczos is exact on an exactly rank-k matrix") {
  const Vector sigma = {3.0, 1.5, 0.75};
  DenseMatrix x = matrix_with_spectrum(30, 45, sigma, 11);
  DataMatrix a(x);
  LanczosConfig cfg;
  cfg.k = 3;
  cfg.seed = 4;
  SketchedSvd sv = block_lanczos(a, cfg);
  REQUIRE(sv.k == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(sv.singular_values[i] - sigma[i]) < 1e-8);
  }
  DenseMatrix residual = x;
  DenseMatrix recon = sketch_reconstruction(sv);
  for (std::size_t i = 0; i < x.size(); ++i) residual.data()[i] -= recon.data()[i];
  CHECK(oracles::power_sigma(residual, 100, 9) < 1e-8);
}

TEST_CASE("block_lanczos per-vector and spectral errors on a decaying spectrum") {
  // Small-scale version of the acceptance setting; the full-size run lives
  // in the acceptance suite.
  const std::size_t d = 60, n = 90, k = 5;
  Vector sigma(d);
  for (std::size_t q = 0; q < d; ++q) sigma[q] = 1.0 / static_cast<double>(q + 1);
  DenseMatrix x = matrix_with_spectrum(d, n, sigma, 13);
  DataMatrix a(x);
  SketchedSvd exact = exact_truncated_svd(a, k + 1);
  const double tail = exact.singular_values[k];  // sigma_{k+1}

  int pass_per_vector = 0, pass_spectral = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    LanczosConfig cfg;
    cfg.k = k;
    cfg.eps_prime = 0.5;
    cfg.seed = 1000 + static_cast<std::uint64_t>(t);
    SketchedSvd sv = block_lanczos(a, cfg);
    bool ok = true;
    for (std::size_t i = 0; i < k; ++i) {
      const double got = sv.singular_values[i] * sv.singular_values[i];
      const double want = exact.singular_values[i] * exact.singular_values[i];
      ok = ok && std::abs(got - want) <= 0.5 * tail * tail;
    }
    pass_per_vector += ok;
    DenseMatrix residual = x;
    DenseMatrix recon = sketch_reconstruction(sv);
    for (std::size_t i = 0; i < x.size(); ++i) residual.data()[i] -= recon.data()[i];
    pass_spectral += oracles::power_sigma(residual, 150, 17) <= 1.5 * tail;
  }
  CHECK(pass_per_vector >= 17);
  CHECK(pass_spectral >= 17);
}

TEST_CASE("block_lanczos validates its parameters") {
  DataMatrix a(gaussian_matrix(10, 14, 3));
  LanczosConfig cfg;
  cfg.k = 11;
  CHECK_THROWS_AS(block_lanczos(a, cfg), ParameterError);
  cfg.k = 2;
  cfg.eps_prime = 1.0;
  CHECK_THROWS_AS(block_lanczos(a, cfg), ParameterError);
}

TEST_CASE("block_lanczos projection identity") {
  DataMatrix a(gaussian_matrix(25, 40, 19));
  LanczosConfig cfg;
  cfg.k = 6;
  cfg.seed = 21;
  SketchedSvd sv = block_lanczos(a, cfg);
  // U~ Sigma~ V~^T equals U~ U~^T A.
  DenseMatrix recon = sketch_reconstruction(sv);
  DenseMatrix proj = a.tmul_mat(sv.left).transposed();  // U~^T A
  DenseMatrix lift;
  kernels::dense_mul_mat(sv.left, proj, lift);
  CHECK(oracles::frobenius_diff(recon, lift) < 1e-8);
}

TEST_CASE("block_lanczos is deterministic") {
  kernels::set_execution(kernels::Execution::Serial);
  DataMatrix a(gaussian_matrix(30, 50, 23));
  LanczosConfig cfg;
  cfg.k = 4;
  cfg.seed = 29;
  SketchedSvd s1 = block_lanczos(a, cfg);
  SketchedSvd s2 = block_lanczos(a, cfg);
  for (std::size_t i = 0; i < s1.k; ++i) CHECK(s1.singular_values[i] == s2.singular_values[i]);
  for (std::size_t i = 0; i < s1.left.size(); ++i) CHECK(s1.left.data()[i] == s2.left.data()[i]);
  kernels::set_execution(kernels::Execution::Parallel);
  SketchedSvd s3 = block_lanczos(a, cfg);
  kernels::set_execution(kernels::Execution::Auto);
  for (std::size_t i = 0; i < s1.k; ++i) {
    CHECK(std::abs(s1.singular_values[i] - s3.singular_values[i]) < 1e-10);
  }
}

TEST_CASE("increasing q does not worsen the approximation") {
  const std::size_t d = 40, n = 60, k = 4;
  Vector sigma(d);
  for (std::size_t q = 0; q < d; ++q) sigma[q] = 1.0 / static_cast<double>((q + 1) * (q + 1));
  DenseMatrix x = matrix_with_spectrum(d, n, sigma, 31);
  DataMatrix a(x);
  double prev = 1e300;
  for (std::size_t q : {2, 4, 8}) {
    LanczosConfig cfg;
    cfg.k = k;
    cfg.seed = 37;
    cfg.q_override = q;
    SketchedSvd sv = block_lanczos(a, cfg);
    DenseMatrix residual = x;
    DenseMatrix recon = sketch_reconstruction(sv);
    for (std::size_t i = 0; i < x.size(); ++i) residual.data()[i] -= recon.data()[i];
    const double err = oracles::power_sigma(residual, 150, 41);
    CHECK(err <= prev + 1e-8);
    prev = err;
  }
}

TEST_CASE("sketched values never exceed the truth by more than the tail bound") {
  const std::size_t d = 30, n = 45, k = 4;
  Vector sigma(d);
  for (std::size_t q = 0; q < d; ++q) sigma[q] = 1.0 / static_cast<double>(q + 1);
  DenseMatrix x = matrix_with_spectrum(d, n, sigma, 43);
  DataMatrix a(x);
  SketchedSvd exact = exact_truncated_svd(a, k + 1);
  const double tail2 = exact.singular_values[k] * exact.singular_values[k];
  LanczosConfig cfg;
  cfg.k = k;
  cfg.seed = 47;
  SketchedSvd sv = block_lanczos(a, cfg);
  double prev = 1e300;
  for (std::size_t i = 0; i < k; ++i) {
    CHECK(sv.singular_values[i] <= prev + 1e-12);
    prev = sv.singular_values[i];
    const double bound2 = exact.singular_values[i] * exact.singular_values[i] + 0.5 * tail2;
    CHECK(sv.singular_values[i] * sv.singular_values[i] <= bound2 + 1e-10);
  }
}

TEST_CASE("exact_truncated_svd on a diagonal matrix") {
  DataMatrix a(DenseMatrix::diagonal({3.0, 2.0, 1.0}));
  SketchedSvd sv = exact_truncated_svd(a, 2);
  CHECK(sv.q == 0);
  CHECK(sv.singular_values[0] == doctest::Approx(3.0));
  CHECK(sv.singular_values[1] == doctest::Approx(2.0));
}

TEST_CASE("exact_truncated_svd squares match the Gram spectrum") {
  DataMatrix a(gaussian_matrix(12, 18, 51));
  SketchedSvd sv = exact_truncated_svd(a, 12);
  EigResult eig = sym_eigs(a.gram());
  for (std::size_t i = 0; i < 12; ++i) {
    const double got = sv.singular_values[i] * sv.singular_values[i];
    CHECK(std::abs(got - eig.values[i]) < 1e-9);
  }
}

TEST_CASE("block_lanczos at high accuracy reproduces the exact factors") {
  DataMatrix a(gaussian_matrix(24, 36, 53));
  SketchedSvd exact = exact_truncated_svd(a, 5);
  LanczosConfig cfg;
  cfg.k = 5;
  cfg.seed = 59;
  cfg.q_override = 30;
  SketchedSvd sv = block_lanczos(a, cfg);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::abs(sv.singular_values[i] - exact.singular_values[i]) < 1e-6);
  }
}

}  // TEST_SUITE
