#pragma once

#include <cstddef>
#include <span>

#include "skridge/dense_matrix.hpp"
#include "skridge/sparse_matrix.hpp"

namespace skridge::kernels {

/// Execution policy for the data-parallel kernels.
///
/// Serial runs the reference loops; Parallel forces the OpenMP loops;
/// Auto picks Parallel when the estimated work clears a threshold.
/// Parallel results must stay within 1e-12 (relative) of Serial —
/// reductions may reassociate, so tests compare with tolerances.
enum class Execution { Serial, Parallel, Auto };

Execution execution();
void set_execution(Execution mode);

/// Flop-count threshold above which Auto dispatches to the parallel path.
inline constexpr std::size_t kAutoParallelWork = 1u << 16;

// Reference implementations. Kept serial forever; the parallel variants are
// tested and benchmarked against these.
namespace serial {

void dense_mul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y);
void dense_tmul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y);
void dense_mul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void dense_tmul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void dense_gram(const DenseMatrix& a, DenseMatrix& c);  // C = A A^T

void sparse_mul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
void sparse_tmul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
void sparse_mul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void sparse_tmul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void sparse_gram(const SparseMatrix& a, DenseMatrix& c);

}  // namespace serial

namespace parallel {

void dense_mul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y);
void dense_tmul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y);
void dense_mul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void dense_tmul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void dense_gram(const DenseMatrix& a, DenseMatrix& c);

void sparse_mul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
void sparse_tmul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
void sparse_mul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void sparse_tmul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void sparse_gram(const SparseMatrix& a, DenseMatrix& c);

}  // namespace parallel

// Dispatching entry points used by DataMatrix. `work` is a flop estimate.
void dense_mul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y);
void dense_tmul_vec(const DenseMatrix& a, std::span<const double> x, std::span<double> y);
void dense_mul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void dense_tmul_mat(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void dense_gram(const DenseMatrix& a, DenseMatrix& c);
void sparse_mul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
void sparse_tmul_vec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
void sparse_mul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void sparse_tmul_mat(const SparseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void sparse_gram(const SparseMatrix& a, DenseMatrix& c);

// Small vector helpers (always serial; lengths here are tiny or the caller
// already parallelizes one level up).
double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);
void axpy(double coef, std::span<const double> x, std::span<double> y);
void scal(double coef, std::span<double> x);

}  // namespace skridge::kernels
