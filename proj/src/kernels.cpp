#include "skridge/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "skridge/errors.hpp"

namespace skridge::kernels {

namespace {

std::atomic<Execution> g_execution{Execution::Auto};

void check_mul(std::size_t rows, std::size_t cols, std::size_t xn, std::size_t yn) {
  if (xn != cols || yn != rows) throw DimensionError("matvec: dimension mismatch");
}

bool go_parallel(std::size_t work) {
#ifdef _OPENMP
  switch (g_execution.load(std::memory_order_relaxed)) {
    case Execution::Serial:
      return false;
    case Execution::Parallel:
      return true;
    case Execution::Auto:
      return work >= kAutoParallelWork && omp_get_max_threads() > 1;
  }
  return false;
#else
  (void)work;
  return false;
#endif
}

}  // namespace

Execution execution() { return g_execution.load(std::memory_order_relaxed); }
void set_execution(Execution mode) { g_execution.store(mode, std::memory_order_relaxed); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double coef, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += coef * x[i];
}

void scal(double coef, std::span<double> x) {
  for (double& v : x) v *= coef;
}

namespace serial {

void dense_mul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  check_mul(a.rows(), a.cols(), x.size(), y.size());
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) axpy(x[j], a.col(j), y);
}

void dense_tmul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  check_mul(a.cols(), a.rows(), x.size(), y.size());
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x);
}

void dense_mul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: dimension mismatch");
  c = DenseMatrix(a.rows(), b.cols());
  for (std::size_t l = 0; l < b.cols(); ++l) dense_mul_vec(a, b.col(l), c.col(l));
}

void dense_tmul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (a.rows() != b.rows()) throw DimensionError("matmul: dimension mismatch");
  c = DenseMatrix(a.cols(), b.cols());
  for (std::size_t l = 0; l < b.cols(); ++l) dense_tmul_vec(a, b.col(l), c.col(l));
}

void dense_gram(const DenseMatrix& a, DenseMatrix& c) {
  // C = A A^T accumulated column-by-column; only the lower triangle is
  // computed, then mirrored.
  const std::size_t d = a.rows();
  c = DenseMatrix(d, d);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto col = a.col(j);
    for (std::size_t q = 0; q < d; ++q) {
      const double v = col[q];
      if (v == 0.0) continue;
      auto out = c.col(q);
      for (std::size_t i = q; i < d; ++i) out[i] += v * col[i];
    }
  }
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t i = q + 1; i < d; ++i) c(q, i) = c(i, q);
}

void sparse_mul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  check_mul(a.rows(), a.cols(), x.size(), y.size());
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    auto rows = a.col_rows(j);
    auto vals = a.col_values(j);
    for (std::size_t p = 0; p < rows.size(); ++p) y[rows[p]] += xj * vals[p];
  }
}

void sparse_tmul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  check_mul(a.cols(), a.rows(), x.size(), y.size());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto rows = a.col_rows(j);
    auto vals = a.col_values(j);
    double s = 0.0;
    for (std::size_t p = 0; p < rows.size(); ++p) s += vals[p] * x[rows[p]];
    y[j] = s;
  }
}

void sparse_mul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: dimension mismatch");
  c = DenseMatrix(a.rows(), b.cols());
  for (std::size_t l = 0; l < b.cols(); ++l) sparse_mul_vec(a, b.col(l), c.col(l));
}

void sparse_tmul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (a.rows() != b.rows()) throw DimensionError("matmul: dimension mismatch");
  c = DenseMatrix(a.cols(), b.cols());
  for (std::size_t l = 0; l < b.cols(); ++l) sparse_tmul_vec(a, b.col(l), c.col(l));
}

void sparse_gram(const SparseMatrix& a, DenseMatrix& c) {
  const std::size_t d = a.rows();
  c = DenseMatrix(d, d);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto rows = a.col_rows(j);
    auto vals = a.col_values(j);
    for (std::size_t p = 0; p < rows.size(); ++p) {
      auto out = c.col(rows[p]);
      const double v = vals[p];
      for (std::size_t q = p; q < rows.size(); ++q) out[rows[q]] += v * vals[q];
    }
  }
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t i = q + 1; i < d; ++i) c(q, i) = c(i, q);
}

}  // namespace serial

namespace parallel {

void dense_mul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  check_mul(a.rows(), a.cols(), x.size(), y.size());
  const std::int64_t rows = static_cast<std::int64_t>(a.rows());
  const std::size_t cols = a.cols();
  const double* data = a.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += data[j * a.rows() + i] * x[j];
    y[i] = s;
  }
}

void dense_tmul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  check_mul(a.cols(), a.rows(), x.size(), y.size());
  const std::int64_t cols = static_cast<std::int64_t>(a.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < cols; ++j) y[j] = dot(a.col(j), x);
}

void dense_mul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: dimension mismatch");
  c = DenseMatrix(a.rows(), b.cols());
  const std::int64_t cols = static_cast<std::int64_t>(b.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t l = 0; l < cols; ++l) serial::dense_mul_vec(a, b.col(l), c.col(l));
}

void dense_tmul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (a.rows() != b.rows()) throw DimensionError("matmul: dimension mismatch");
  c = DenseMatrix(a.cols(), b.cols());
  const std::int64_t cols = static_cast<std::int64_t>(b.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t l = 0; l < cols; ++l) serial::dense_tmul_vec(a, b.col(l), c.col(l));
}

void dense_gram(const DenseMatrix& a, DenseMatrix& c) {
  const std::size_t d = a.rows();
  c = DenseMatrix(d, d);
  const std::int64_t dq = static_cast<std::int64_t>(d);
  // One output column per iteration: C(:,q) = A * (row q of A).
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t q = 0; q < dq; ++q) {
    auto out = c.col(q);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double v = a(q, j);
      if (v == 0.0) continue;
      auto col = a.col(j);
      for (std::size_t i = q; i < d; ++i) out[i] += v * col[i];
    }
  }
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t i = q + 1; i < d; ++i) c(q, i) = c(i, q);
}

void sparse_mul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  check_mul(a.rows(), a.cols(), x.size(), y.size());
#ifdef _OPENMP
  std::fill(y.begin(), y.end(), 0.0);
  const std::int64_t cols = static_cast<std::int64_t>(a.cols());
#pragma omp parallel
  {
    std::vector<double> local(y.size(), 0.0);
#pragma omp for schedule(static) nowait
    for (std::int64_t j = 0; j < cols; ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      auto rows = a.col_rows(j);
      auto vals = a.col_values(j);
      for (std::size_t p = 0; p < rows.size(); ++p) local[rows[p]] += xj * vals[p];
    }
#pragma omp critical
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += local[i];
  }
#else
  serial::sparse_mul_vec(a, x, y);
#endif
}

void sparse_tmul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  check_mul(a.cols(), a.rows(), x.size(), y.size());
  const std::int64_t cols = static_cast<std::int64_t>(a.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < cols; ++j) {
    auto rows = a.col_rows(j);
    auto vals = a.col_values(j);
    double s = 0.0;
    for (std::size_t p = 0; p < rows.size(); ++p) s += vals[p] * x[rows[p]];
    y[j] = s;
  }
}

void sparse_mul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: dimension mismatch");
  c = DenseMatrix(a.rows(), b.cols());
  const std::int64_t cols = static_cast<std::int64_t>(b.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t l = 0; l < cols; ++l) serial::sparse_mul_vec(a, b.col(l), c.col(l));
}

void sparse_tmul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (a.rows() != b.rows()) throw DimensionError("matmul: dimension mismatch");
  c = DenseMatrix(a.cols(), b.cols());
  const std::int64_t cols = static_cast<std::int64_t>(b.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t l = 0; l < cols; ++l) serial::sparse_tmul_vec(a, b.col(l), c.col(l));
}

void sparse_gram(const SparseMatrix& a, DenseMatrix& c) {
  // Scatter-heavy; per-thread accumulators would cost d*d each. Diagnostics
  // only call this at small d, so the reference loop is kept.
  serial::sparse_gram(a, c);
}

}  // namespace parallel

void dense_mul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (go_parallel(a.rows() * a.cols()))
    parallel::dense_mul_vec(a, x, y);
  else
    serial::dense_mul_vec(a, x, y);
}

void dense_tmul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (go_parallel(a.rows() * a.cols()))
    parallel::dense_tmul_vec(a, x, y);
  else
    serial::dense_tmul_vec(a, x, y);
}

void dense_mul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (go_parallel(a.rows() * a.cols() * b.cols()))
    parallel::dense_mul_mat(a, b, c);
  else
    serial::dense_mul_mat(a, b, c);
}

void dense_tmul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (go_parallel(a.rows() * a.cols() * b.cols()))
    parallel::dense_tmul_mat(a, b, c);
  else
    serial::dense_tmul_mat(a, b, c);
}

void dense_gram(const DenseMatrix& a, DenseMatrix& c) {
  if (go_parallel(a.rows() * a.rows() * a.cols()))
    parallel::dense_gram(a, c);
  else
    serial::dense_gram(a, c);
}

void sparse_mul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (go_parallel(a.nnz()))
    parallel::sparse_mul_vec(a, x, y);
  else
    serial::sparse_mul_vec(a, x, y);
}

void sparse_tmul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (go_parallel(a.nnz()))
    parallel::sparse_tmul_vec(a, x, y);
  else
    serial::sparse_tmul_vec(a, x, y);
}

void sparse_mul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (go_parallel(a.nnz() * b.cols()))
    parallel::sparse_mul_mat(a, b, c);
  else
    serial::sparse_mul_mat(a, b, c);
}

void sparse_tmul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  if (go_parallel(a.nnz() * b.cols()))
    parallel::sparse_tmul_mat(a, b, c);
  else
    serial::sparse_tmul_mat(a, b, c);
}

void sparse_gram(const SparseMatrix& a, DenseMatrix& c) { serial::sparse_gram(a, c); }

}  // namespace skridge::kernels
