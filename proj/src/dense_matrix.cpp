#include "skridge/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "skridge/errors.hpp"

namespace skridge {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Vector entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DimensionError("dense matrix: entry count does not match rows*cols");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(const Vector& diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::left_cols(std::size_t count) const {
  if (count > cols_) throw DimensionError("left_cols: count exceeds column count");
  DenseMatrix m(rows_, count);
  std::copy(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(rows_ * count),
            m.entries_.begin());
  return m;
}

void DenseMatrix::set_col(std::size_t j, std::span<const double> values) {
  if (j >= cols_ || values.size() != rows_) throw DimensionError("set_col: bad shape");
  std::copy(values.begin(), values.end(), entries_.begin() + static_cast<std::ptrdiff_t>(j * rows_));
}

bool DenseMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace skridge
