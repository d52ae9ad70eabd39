#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace skridge {

using Vector = std::vector<double>;

/// Column-major dense matrix of doubles.
///
/// Columns are contiguous, which matches how every algorithm here walks the
/// data (per-point access, Gram products, block orthogonalization).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, Vector entries);

  static DenseMatrix identity(std::size_t n);
  /// Matrix with the given diagonal, zero elsewhere (square).
  static DenseMatrix diagonal(const Vector& diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return entries_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {entries_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const {
    return {entries_.data() + j * rows_, rows_};
  }

  double* data() { return entries_.data(); }
  const double* data() const { return entries_.data(); }
  const Vector& entries() const { return entries_; }

  DenseMatrix transposed() const;
  /// Keep the first `count` columns, drop the rest.
  DenseMatrix left_cols(std::size_t count) const;
  void set_col(std::size_t j, std::span<const double> values);

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector entries_;  // column-major, rows_*cols_
};

}  // namespace skridge
