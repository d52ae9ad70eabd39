#include "skridge/data_matrix.hpp"

#include <cmath>

#include "skridge/errors.hpp"
#include "skridge/kernels.hpp"

namespace skridge {

namespace {
void check_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError("data matrix: scale must be positive and finite");
  }
}
}  // namespace

DataMatrix::DataMatrix(DenseMatrix dense, double scale) : scale_(scale) {
  check_scale(scale);
  if (!dense.all_finite()) throw InputError("data matrix: entries must be finite");
  storage_ = std::make_shared<const Storage>(std::move(dense));
}

DataMatrix::DataMatrix(SparseMatrix sparse, double scale) : scale_(scale) {
  check_scale(scale);
  storage_ = std::make_shared<const Storage>(std::move(sparse));
}

std::size_t DataMatrix::rows() const {
  if (!storage_) return 0;
  return is_sparse() ? sparse()->rows() : dense()->rows();
}

std::size_t DataMatrix::cols() const {
  if (!storage_) return 0;
  return is_sparse() ? sparse()->cols() : dense()->cols();
}

bool DataMatrix::is_sparse() const {
  return storage_ && std::holds_alternative<SparseMatrix>(*storage_);
}

std::size_t DataMatrix::stored_nnz() const {
  if (!storage_) return 0;
  return is_sparse() ? sparse()->nnz() : dense()->size();
}

const DenseMatrix* DataMatrix::dense() const {
  return storage_ ? std::get_if<DenseMatrix>(storage_.get()) : nullptr;
}

const SparseMatrix* DataMatrix::sparse() const {
  return storage_ ? std::get_if<SparseMatrix>(storage_.get()) : nullptr;
}

DataMatrix DataMatrix::scaled(double factor) const {
  check_scale(factor);
  DataMatrix out = *this;
  out.scale_ = scale_ * factor;
  return out;
}

DenseMatrix DataMatrix::densified() const {
  DenseMatrix out = is_sparse() ? sparse()->densified() : *dense();
  if (scale_ != 1.0) {
    kernels::scal(scale_, {out.data(), out.size()});
  }
  return out;
}

Vector DataMatrix::mul_vec(std::span<const double> x) const {
  Vector y(rows());
  if (is_sparse())
    kernels::sparse_mul_vec(*sparse(), x, y);
  else
    kernels::dense_mul_vec(*dense(), x, y);
  if (scale_ != 1.0) kernels::scal(scale_, y);
  return y;
}

Vector DataMatrix::tmul_vec(std::span<const double> x) const {
  Vector y(cols());
  if (is_sparse())
    kernels::sparse_tmul_vec(*sparse(), x, y);
  else
    kernels::dense_tmul_vec(*dense(), x, y);
  if (scale_ != 1.0) kernels::scal(scale_, y);
  return y;
}

DenseMatrix DataMatrix::mul_mat(const DenseMatrix& b) const {
  DenseMatrix c;
  if (is_sparse())
    kernels::sparse_mul_mat(*sparse(), b, c);
  else
    kernels::dense_mul_mat(*dense(), b, c);
  if (scale_ != 1.0) kernels::scal(scale_, {c.data(), c.size()});
  return c;
}

DenseMatrix DataMatrix::tmul_mat(const DenseMatrix& b) const {
  DenseMatrix c;
  if (is_sparse())
    kernels::sparse_tmul_mat(*sparse(), b, c);
  else
    kernels::dense_tmul_mat(*dense(), b, c);
  if (scale_ != 1.0) kernels::scal(scale_, {c.data(), c.size()});
  return c;
}

DenseMatrix DataMatrix::gram() const {
  DenseMatrix c;
  if (is_sparse())
    kernels::sparse_gram(*sparse(), c);
  else
    kernels::dense_gram(*dense(), c);
  if (scale_ != 1.0) kernels::scal(scale_ * scale_, {c.data(), c.size()});
  return c;
}

double DataMatrix::col_sq_norm(std::size_t j) const {
  if (j >= cols()) throw DimensionError("col_sq_norm: column out of range");
  double s = 0.0;
  if (is_sparse()) {
    for (double v : sparse()->col_values(j)) s += v * v;
  } else {
    auto col = dense()->col(j);
    s = kernels::dot(col, col);
  }
  return scale_ * scale_ * s;
}

double DataMatrix::col_dot(std::size_t j, std::span<const double> x) const {
  if (j >= cols() || x.size() != rows()) throw DimensionError("col_dot: dimension mismatch");
  double s = 0.0;
  if (is_sparse()) {
    auto rows_ = sparse()->col_rows(j);
    auto vals = sparse()->col_values(j);
    for (std::size_t p = 0; p < rows_.size(); ++p) s += vals[p] * x[rows_[p]];
  } else {
    s = kernels::dot(dense()->col(j), x);
  }
  return scale_ * s;
}

void DataMatrix::col_axpy(std::size_t j, double coef, std::span<double> y) const {
  if (j >= cols() || y.size() != rows()) throw DimensionError("col_axpy: dimension mismatch");
  const double c = coef * scale_;
  if (is_sparse()) {
    auto rows_ = sparse()->col_rows(j);
    auto vals = sparse()->col_values(j);
    for (std::size_t p = 0; p < rows_.size(); ++p) y[rows_[p]] += c * vals[p];
  } else {
    kernels::axpy(c, dense()->col(j), y);
  }
}

}  // namespace skridge
