#include "skridge/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skridge/errors.hpp"
#include "skridge/kernels.hpp"

namespace skridge {

namespace {

constexpr std::size_t kGramRouteMaxDim = 64;
constexpr int kMaxJacobiSweeps = 60;

double max_col_norm(const DenseMatrix& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, kernels::nrm2(m.col(j)));
  return best;
}

/// Unit vector orthogonal to the first `count` columns of `w`; picks the
/// standard basis vector with the largest residual and re-projects it.
Vector orthogonal_completion(const DenseMatrix& w, std::size_t count) {
  const std::size_t n = w.rows();
  Vector best_v;
  double best_norm = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    Vector v(n, 0.0);
    v[j] = 1.0;
    for (std::size_t t = 0; t < count; ++t) {
      auto b = w.col(t);
      kernels::axpy(-kernels::dot(b, v), b, v);
    }
    const double nv = kernels::nrm2(v);
    if (nv > best_norm) {
      best_norm = nv;
      best_v = std::move(v);
    }
    if (best_norm > 0.7) break;  // good enough, stop scanning
  }
  for (std::size_t t = 0; t < count; ++t) {
    auto b = w.col(t);
    kernels::axpy(-kernels::dot(b, best_v), b, best_v);
  }
  kernels::scal(1.0 / kernels::nrm2(best_v), best_v);
  return best_v;
}

}  // namespace

std::size_t MgsBasis::append_block(const DenseMatrix& block) {
  if (block.rows() != rows_) throw DimensionError("basis append: row count mismatch");
  const double ref = max_col_norm(block);
  if (ref == 0.0) return 0;
  const double drop = kRankDropTol * ref;
  std::size_t appended = 0;
  for (std::size_t j = 0; j < block.cols(); ++j) {
    Vector v(block.col(j).begin(), block.col(j).end());
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : cols_) kernels::axpy(-kernels::dot(b, v), b, v);
    }
    const double nv = kernels::nrm2(v);
    if (nv < drop) continue;
    kernels::scal(1.0 / nv, v);
    cols_.push_back(std::move(v));
    ++appended;
  }
  return appended;
}

DenseMatrix MgsBasis::matrix() const {
  DenseMatrix q(rows_, cols_.size());
  for (std::size_t j = 0; j < cols_.size(); ++j) q.set_col(j, cols_[j]);
  return q;
}

DenseMatrix orthonormalize(const DenseMatrix& m) {
  if (m.cols() == 0) throw DimensionError("orthonormalize: input has no columns");
  if (max_col_norm(m) == 0.0) throw EmptyBasisError("orthonormalize: all columns are zero");
  MgsBasis basis(m.rows());
  basis.append_block(m);
  return basis.matrix();
}

EigResult sym_eigs(const DenseMatrix& s) {
  const std::size_t n = s.rows();
  if (n != s.cols()) throw InputError("sym_eigs: matrix not square");
  double max_abs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) max_abs = std::max(max_abs, std::abs(s.data()[i]));
  const double sym_tol = 1e-10 * std::max(1.0, max_abs);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i)
      if (std::abs(s(i, j) - s(j, i)) > sym_tol)
        throw InputError("sym_eigs: matrix not symmetric");

  DenseMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = 0.5 * (s(i, j) + s(j, i));
  DenseMatrix v = DenseMatrix::identity(n);

  double fro = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) fro += a.data()[i] * a.data()[i];
  fro = std::sqrt(fro);
  const double rot_tol = 1e-15 * std::max(fro, 1e-300);

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= rot_tol) continue;
        rotated = true;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - sn * aiq;
          a(i, q) = sn * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - sn * aqi;
          a(q, i) = sn * api + c * aqi;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - sn * viq;
          v(i, q) = sn * vip + c * viq;
        }
      }
    }
    if (!rotated) break;
    if (sweep == kMaxJacobiSweeps - 1) {
      throw std::runtime_error("sym_eigs: Jacobi iteration did not converge");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  EigResult out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    out.vectors.set_col(j, v.col(order[j]));
  }
  // Largest-magnitude entry of each eigenvector made positive.
  for (std::size_t j = 0; j < n; ++j) {
    auto col = out.vectors.col(j);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(col[i]) > std::abs(col[arg])) arg = i;
    if (col[arg] < 0.0) kernels::scal(-1.0, col);
  }
  return out;
}

void normalize_svd_signs(DenseMatrix& left, DenseMatrix& right) {
  for (std::size_t j = 0; j < left.cols(); ++j) {
    auto u = left.col(j);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < u.size(); ++i)
      if (std::abs(u[i]) > std::abs(u[arg])) arg = i;
    if (u[arg] < 0.0) {
      kernels::scal(-1.0, u);
      if (j < right.cols()) kernels::scal(-1.0, right.col(j));
    }
  }
}

namespace {

/// Gram-route SVD: eigendecompose the Gram matrix of the smaller dimension.
SvdResult gram_svd(const DenseMatrix& m, std::size_t k) {
  const bool rows_small = m.rows() <= m.cols();
  DenseMatrix g;
  if (rows_small) {
    kernels::dense_gram(m, g);  // M M^T
  } else {
    kernels::dense_tmul_mat(m, m, g);  // M^T M
  }
  EigResult eig = sym_eigs(g);
  const double top = std::max(eig.values.empty() ? 0.0 : eig.values.front(), 0.0);
  const double sigma_floor = std::sqrt(top) * 1e-13;

  Vector sigma(k);
  DenseMatrix small = eig.vectors.left_cols(k);  // factors on the small side
  DenseMatrix big(rows_small ? m.cols() : m.rows(), k);
  for (std::size_t j = 0; j < k; ++j) {
    sigma[j] = std::sqrt(std::max(eig.values[j], 0.0));
    if (sigma[j] > sigma_floor) {
      Vector w(big.rows());
      if (rows_small)
        kernels::dense_tmul_vec(m, small.col(j), w);  // v = M^T u / sigma
      else
        kernels::dense_mul_vec(m, small.col(j), w);  // u = M v / sigma
      kernels::scal(1.0 / kernels::nrm2(w), w);
      big.set_col(j, w);
    } else {
      sigma[j] = 0.0;
      big.set_col(j, orthogonal_completion(big, j));
    }
  }
  SvdResult out;
  if (rows_small) {
    out.left = std::move(small);
    out.right = std::move(big);
  } else {
    out.left = std::move(big);
    out.right = std::move(small);
  }
  out.singular_values = std::move(sigma);
  return out;
}

/// One-sided Jacobi: rotate column pairs of a tall matrix until mutually
/// orthogonal; column norms become the singular values.
SvdResult jacobi_svd(const DenseMatrix& m, std::size_t k) {
  const bool transposed = m.rows() < m.cols();
  DenseMatrix b = transposed ? m.transposed() : m;
  const std::size_t cols = b.cols();
  DenseMatrix v = DenseMatrix::identity(cols);

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        auto bp = b.col(p);
        auto bq = b.col(q);
        const double alpha = kernels::dot(bp, bp);
        const double beta = kernels::dot(bq, bq);
        const double gamma = kernels::dot(bp, bq);
        if (std::abs(gamma) <= 1e-14 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0) ? 1.0 / (zeta + std::sqrt(1.0 + zeta * zeta))
                                       : 1.0 / (zeta - std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = c * t;
        for (std::size_t i = 0; i < b.rows(); ++i) {
          const double x = bp[i], y = bq[i];
          bp[i] = c * x - sn * y;
          bq[i] = sn * x + c * y;
        }
        auto vp = v.col(p);
        auto vq = v.col(q);
        for (std::size_t i = 0; i < cols; ++i) {
          const double x = vp[i], y = vq[i];
          vp[i] = c * x - sn * y;
          vq[i] = sn * x + c * y;
        }
      }
    }
    if (!rotated) break;
    if (sweep == kMaxJacobiSweeps - 1) {
      throw std::runtime_error("small_svd: Jacobi iteration did not converge");
    }
  }

  Vector norms(cols);
  for (std::size_t j = 0; j < cols; ++j) norms[j] = kernels::nrm2(b.col(j));
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double sigma_floor = (cols == 0 ? 0.0 : norms[order[0]] * 1e-13);
  Vector sigma(k);
  DenseMatrix u(b.rows(), k), w(cols, k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t src = order[j];
    sigma[j] = norms[src];
    w.set_col(j, v.col(src));
    if (sigma[j] > sigma_floor) {
      Vector col(b.col(src).begin(), b.col(src).end());
      kernels::scal(1.0 / sigma[j], col);
      u.set_col(j, col);
    } else {
      sigma[j] = 0.0;
      u.set_col(j, orthogonal_completion(u, j));
    }
  }
  SvdResult out;
  if (transposed) {
    out.left = std::move(w);
    out.right = std::move(u);
  } else {
    out.left = std::move(u);
    out.right = std::move(w);
  }
  out.singular_values = std::move(sigma);
  return out;
}

}  // namespace

SvdResult small_svd(const DenseMatrix& m, std::size_t k) {
  if (k == 0) throw ParameterError("small_svd: k must be at least 1");
  if (k > std::min(m.rows(), m.cols())) {
    throw ParameterError("small_svd: k exceeds min(rows, cols)");
  }
  SvdResult out = (std::min(m.rows(), m.cols()) <= kGramRouteMaxDim) ? gram_svd(m, k)
                                                                     : jacobi_svd(m, k);
  normalize_svd_signs(out.left, out.right);
  return out;
}

}  // namespace skridge
