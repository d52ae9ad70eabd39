#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skridge/dense_matrix.hpp"

namespace skridge {

/// Compressed-sparse-column matrix. Columns are the natural unit here
/// (one column per data point), so CSC keeps per-point access contiguous.
///
/// Invariants, checked at construction: row indices strictly increasing
/// within each column, all indices < rows, values finite and nonzero.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> col_ptr,
               std::vector<std::size_t> row_idx, Vector values);

  /// Builder: collect (row, col, value) triplets, then assemble.
  class Builder {
   public:
    Builder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
    void add(std::size_t row, std::size_t col, double value);
    SparseMatrix build();

   private:
    std::size_t rows_, cols_;
    std::vector<std::size_t> rows_list_, cols_list_;
    Vector values_;
  };

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> col_rows(std::size_t j) const {
    return {row_idx_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }
  std::span<const double> col_values(std::size_t j) const {
    return {values_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }

  const std::vector<std::size_t>& col_ptr() const { return col_ptr_; }
  const std::vector<std::size_t>& row_idx() const { return row_idx_; }
  const Vector& values() const { return values_; }

  DenseMatrix densified() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> col_ptr_;  // size cols_+1
  std::vector<std::size_t> row_idx_;
  Vector values_;
};

}  // namespace skridge
