#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <variant>

#include "skridge/dense_matrix.hpp"
#include "skridge/sparse_matrix.hpp"

namespace skridge {

/// Design matrix handle: dense or CSC storage plus a uniform positive scale,
/// so a rescaled view (e.g. divide every entry by sqrt(n)) never copies.
/// Logical entry (i, j) = scale * stored entry (i, j).
///
/// Storage is shared and immutable; copies are cheap and thread-safe to read.
class DataMatrix {
 public:
  using Storage = std::variant<DenseMatrix, SparseMatrix>;

  DataMatrix() = default;
  explicit DataMatrix(DenseMatrix dense, double scale = 1.0);
  explicit DataMatrix(SparseMatrix sparse, double scale = 1.0);

  std::size_t rows() const;
  std::size_t cols() const;
  double scale() const { return scale_; }
  bool is_sparse() const;
  /// Nonzeros actually stored (rows*cols for dense storage).
  std::size_t stored_nnz() const;

  const DenseMatrix* dense() const;
  const SparseMatrix* sparse() const;

  /// Same storage, scale multiplied by `factor` (> 0).
  DataMatrix scaled(double factor) const;

  /// Logical entries as a plain dense matrix (scale folded in).
  DenseMatrix densified() const;

  // Linear maps on logical entries. Output sized by the callee.
  Vector mul_vec(std::span<const double> x) const;    // rows-vector = A * x
  Vector tmul_vec(std::span<const double> x) const;   // cols-vector = A^T * x
  DenseMatrix mul_mat(const DenseMatrix& b) const;    // A * B
  DenseMatrix tmul_mat(const DenseMatrix& b) const;   // A^T * B

  /// Gram matrix A * A^T (rows x rows) of the logical entries.
  DenseMatrix gram() const;

  /// Squared Euclidean norm of logical column j.
  double col_sq_norm(std::size_t j) const;
  /// Dot product of logical column j with a rows-vector.
  double col_dot(std::size_t j, std::span<const double> x) const;
  /// y += coef * (logical column j).
  void col_axpy(std::size_t j, double coef, std::span<double> y) const;

 private:
  std::shared_ptr<const Storage> storage_;
  double scale_ = 1.0;
};

}  // namespace skridge
