#include "skridge/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skridge/errors.hpp"

namespace skridge {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> col_ptr, std::vector<std::size_t> row_idx,
                           Vector values)
    : rows_(rows),
      cols_(cols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      values_(std::move(values)) {
  if (col_ptr_.size() != cols_ + 1 || col_ptr_.front() != 0 || col_ptr_.back() != values_.size() ||
      row_idx_.size() != values_.size()) {
    throw DimensionError("sparse matrix: inconsistent CSC arrays");
  }
  for (std::size_t j = 0; j < cols_; ++j) {
    if (col_ptr_[j] > col_ptr_[j + 1]) throw InputError("sparse matrix: col_ptr not monotone");
    for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] >= rows_) throw InputError("sparse matrix: row index out of range");
      if (p > col_ptr_[j] && row_idx_[p] <= row_idx_[p - 1]) {
        throw InputError("sparse matrix: row indices not strictly increasing within a column");
      }
      if (!std::isfinite(values_[p]) || values_[p] == 0.0) {
        throw InputError("sparse matrix: values must be finite and nonzero");
      }
    }
  }
}

void SparseMatrix::Builder::add(std::size_t row, std::size_t col, double value) {
  if (row >= rows_ || col >= cols_) throw InputError("sparse builder: index out of range");
  if (value == 0.0) return;
  rows_list_.push_back(row);
  cols_list_.push_back(col);
  values_.push_back(value);
}

SparseMatrix SparseMatrix::Builder::build() {
  std::vector<std::size_t> order(values_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cols_list_[a] != cols_list_[b]) return cols_list_[a] < cols_list_[b];
    return rows_list_[a] < rows_list_[b];
  });
  std::vector<std::size_t> col_ptr(cols_ + 1, 0), row_idx(values_.size());
  Vector values(values_.size());
  for (std::size_t p = 0; p < order.size(); ++p) {
    row_idx[p] = rows_list_[order[p]];
    values[p] = values_[order[p]];
    ++col_ptr[cols_list_[order[p]] + 1];
  }
  for (std::size_t j = 0; j < cols_; ++j) col_ptr[j + 1] += col_ptr[j];
  return SparseMatrix(rows_, cols_, std::move(col_ptr), std::move(row_idx), std::move(values));
}

DenseMatrix SparseMatrix::densified() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t j = 0; j < cols_; ++j) {
    auto rows = col_rows(j);
    auto vals = col_values(j);
    for (std::size_t p = 0; p < rows.size(); ++p) d(rows[p], j) = vals[p];
  }
  return d;
}

}  // namespace skridge
