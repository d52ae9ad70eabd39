#include "skridge/sketch.hpp"

#include <algorithm>
#include <cmath>

#include "skridge/errors.hpp"
#include "skridge/factorize.hpp"
#include "skridge/kernels.hpp"
#include "skridge/random.hpp"

namespace skridge {

std::size_t lanczos_iterations(std::size_t n, double eps_prime) {
  const double q = std::ceil(std::log(static_cast<double>(n)) / std::sqrt(eps_prime));
  return std::max<std::size_t>(2, static_cast<std::size_t>(q));
}

DenseMatrix krylov_block(const DataMatrix& a, const DenseMatrix& pi, std::size_t q) {
  if (pi.rows() != a.cols()) {
    throw DimensionError("krylov_block: test matrix rows must equal data columns");
  }
  if (q < 1) throw ParameterError("krylov_block: q must be at least 1");

  MgsBasis basis(a.rows());
  DenseMatrix block = a.mul_mat(pi);  // A * Pi
  std::size_t appended = basis.append_block(block);
  if (basis.size() == 0) throw EmptyBasisError("krylov_block: A * Pi is numerically zero");

  for (std::size_t j = 1; j < q && appended > 0; ++j) {
    // Next block from the orthonormalized tail of the previous one; spans
    // (A A^T) * previous in exact arithmetic.
    DenseMatrix prev(a.rows(), appended);
    const std::size_t base = basis.size() - appended;
    for (std::size_t t = 0; t < appended; ++t) prev.set_col(t, basis.columns()[base + t]);
    block = a.mul_mat(a.tmul_mat(prev));
    appended = basis.append_block(block);
  }
  return basis.matrix();
}

SketchedSvd block_lanczos(const DataMatrix& a, const LanczosConfig& cfg) {
  const std::size_t d = a.rows();
  const std::size_t n = a.cols();
  if (cfg.k < 1 || cfg.k > std::min(d, n)) {
    throw ParameterError("block_lanczos: k must satisfy 1 <= k <= min(d, n)");
  }
  if (!(cfg.eps_prime > 0.0 && cfg.eps_prime < 1.0)) {
    throw ParameterError("block_lanczos: eps_prime must lie in (0, 1)");
  }
  const std::size_t q = cfg.q_override ? *cfg.q_override : lanczos_iterations(n, cfg.eps_prime);

  DenseMatrix pi = gaussian_matrix(n, cfg.k, cfg.seed);
  DenseMatrix basis = krylov_block(a, pi, q);
  const std::size_t width = basis.cols();
  const std::size_t k = std::min(cfg.k, width);

  // Top-k of Q^T A through the width x width Gram matrix; avoids factoring a
  // width x n matrix when n is large.
  DenseMatrix proj = a.tmul_mat(basis).transposed();  // Q^T A, width x n
  DenseMatrix gram;
  kernels::dense_gram(proj, gram);  // (Q^T A)(Q^T A)^T
  EigResult eig = sym_eigs(gram);

  SketchedSvd out;
  out.k = k;
  out.q = q;
  out.rank_reduced = k < cfg.k;
  out.singular_values.resize(k);
  DenseMatrix w = eig.vectors.left_cols(k);
  for (std::size_t j = 0; j < k; ++j) {
    out.singular_values[j] = std::sqrt(std::max(eig.values[j], 0.0));
  }

  DenseMatrix left;
  kernels::dense_mul_mat(basis, w, left);  // U~ = Q W
  out.left = std::move(left);

  DenseMatrix right(n, k);
  Vector tmp(n);
  for (std::size_t j = 0; j < k; ++j) {
    kernels::dense_tmul_vec(proj, w.col(j), tmp);  // (Q^T A)^T w_j
    const double nrm = kernels::nrm2(tmp);
    if (nrm > 0.0) kernels::scal(1.0 / nrm, tmp);
    right.set_col(j, tmp);
  }
  out.right = std::move(right);

  normalize_svd_signs(out.left, out.right);
  return out;
}

SketchedSvd exact_truncated_svd(const DataMatrix& a, std::size_t k) {
  if (k < 1 || k > std::min(a.rows(), a.cols())) {
    throw ParameterError("exact_truncated_svd: k must satisfy 1 <= k <= min(d, n)");
  }
  SvdResult svd = small_svd(a.densified(), k);
  SketchedSvd out;
  out.left = std::move(svd.left);
  out.singular_values = std::move(svd.singular_values);
  out.right = std::move(svd.right);
  out.k = k;
  out.q = 0;
  return out;
}

}  // namespace skridge
