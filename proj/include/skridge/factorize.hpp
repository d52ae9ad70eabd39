#pragma once

#include <cstddef>
#include <vector>

#include "skridge/dense_matrix.hpp"

namespace skridge {

/// Relative column-norm threshold below which orthonormalization drops a
/// numerically dependent column.
inline constexpr double kRankDropTol = 1e-12;

/// Growable orthonormal basis built by modified Gram-Schmidt with a second
/// projection pass. Used for plain orthonormalization and for appending
/// Krylov blocks against all previously accepted columns.
class MgsBasis {
 public:
  explicit MgsBasis(std::size_t rows) : rows_(rows) {}

  /// Orthogonalize each column of `block` against the current basis (twice)
  /// and append the survivors. A column is dropped when its residual norm
  /// falls below kRankDropTol times the largest original column norm of
  /// `block`. Returns the number of columns appended.
  std::size_t append_block(const DenseMatrix& block);

  std::size_t rows() const { return rows_; }
  std::size_t size() const { return cols_.size(); }
  const std::vector<Vector>& columns() const { return cols_; }
  DenseMatrix matrix() const;

 private:
  std::size_t rows_;
  std::vector<Vector> cols_;
};

/// Orthonormal basis for the column space of `m`; may have fewer columns
/// than `m` when columns are numerically dependent. All-zero input raises
/// EmptyBasisError.
DenseMatrix orthonormalize(const DenseMatrix& m);

struct EigResult {
  Vector values;        // descending
  DenseMatrix vectors;  // columns match values
};

/// Eigendecomposition of a symmetric matrix via cyclic Jacobi rotations.
/// Input must be symmetric within 1e-10 relative to its largest entry.
/// Meant for the small matrices this library builds (Gram blocks,
/// conditioned operators); cost grows as n^3 per sweep.
EigResult sym_eigs(const DenseMatrix& s);

struct SvdResult {
  DenseMatrix left;        // column-orthonormal
  Vector singular_values;  // non-increasing, >= 0
  DenseMatrix right;       // column-orthonormal
};

/// Top-k singular triplets of a dense matrix.
///
/// Route: symmetric eigendecomposition of the Gram matrix of the smaller
/// dimension when min(rows, cols) <= 64, one-sided Jacobi otherwise.
/// Sign convention: in each left singular vector the entry of largest
/// magnitude is positive, ties broken by lowest index.
SvdResult small_svd(const DenseMatrix& m, std::size_t k);

/// Flip triplet signs in place to the small_svd convention.
void normalize_svd_signs(DenseMatrix& left, DenseMatrix& right);

}  // namespace skridge
