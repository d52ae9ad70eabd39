#include "skridge/precond.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skridge/errors.hpp"
#include "skridge/factorize.hpp"
#include "skridge/kernels.hpp"

namespace skridge {

namespace {
constexpr std::size_t kConditionGuardDim = 2000;

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("preconditioner: lambda must be positive");
  }
}
}  // namespace

SpectrumSummary::SpectrumSummary(Vector eigs, double lam) : eigenvalues(std::move(eigs)), lambda(lam) {
  double prev = std::numeric_limits<double>::infinity();
  const double floor = eigenvalues.empty() ? 0.0 : -1e-10 * std::max(1.0, eigenvalues.front());
  for (double& v : eigenvalues) {
    if (v < floor) throw InputError("spectrum: negative eigenvalue");
    if (v < 0.0) v = 0.0;  // clamp eigensolver round-off
    if (v > prev) throw InputError("spectrum: eigenvalues must be descending");
    prev = v;
  }
}

void Preconditioner::validate() const {
  check_lambda(lambda_);
  const double cap = 1.0 / std::sqrt(lambda_) * (1.0 + 1e-12);
  double prev = 0.0;
  for (double v : inv_sqrt_diag_) {
    if (!(v > 0.0) || v > cap) throw InputError("preconditioner: coefficient out of range");
    if (v < prev) throw InputError("preconditioner: coefficients must be non-decreasing");
    prev = v;
  }
  if (!inv_sqrt_diag_.empty() && inv_sqrt_diag_.back() != tail_coeff_) {
    throw InputError("preconditioner: tail coefficient mismatch");
  }
  if (basis_.cols() != inv_sqrt_diag_.size() || (rank() > 0 && basis_.rows() != dim_)) {
    throw DimensionError("preconditioner: basis shape mismatch");
  }
}

Preconditioner Preconditioner::identity(std::size_t dim, double lambda) {
  check_lambda(lambda);
  Preconditioner p;
  p.kind_ = Kind::Identity;
  p.dim_ = dim;
  p.lambda_ = lambda;
  p.tail_coeff_ = 1.0;
  p.basis_ = DenseMatrix(dim, 0);
  return p;
}

double Preconditioner::min_inv_eigenvalue() const {
  const double lead = inv_sqrt_diag_.empty() ? tail_coeff_ : inv_sqrt_diag_.front();
  return lead * lead;
}

void Preconditioner::apply_inv_sqrt(std::span<const double> v, std::span<double> out) const {
  if (v.size() != dim_ || out.size() != dim_) {
    throw DimensionError("apply_inv_sqrt: vector length mismatch");
  }
  for (std::size_t i = 0; i < dim_; ++i) out[i] = tail_coeff_ * v[i];
  const std::size_t k = rank();
  if (k == 0) return;
  Vector proj(k);
  kernels::dense_tmul_vec(basis_, v, proj);
  for (std::size_t j = 0; j < k; ++j) proj[j] *= inv_sqrt_diag_[j] - tail_coeff_;
  Vector lift(dim_);
  kernels::dense_mul_vec(basis_, proj, lift);
  kernels::axpy(1.0, lift, out);
}

void Preconditioner::apply_sqrt(std::span<const double> v, std::span<double> out) const {
  if (v.size() != dim_ || out.size() != dim_) {
    throw DimensionError("apply_sqrt: vector length mismatch");
  }
  const double inv_tail = 1.0 / tail_coeff_;
  for (std::size_t i = 0; i < dim_; ++i) out[i] = inv_tail * v[i];
  const std::size_t k = rank();
  if (k == 0) return;
  Vector proj(k);
  kernels::dense_tmul_vec(basis_, v, proj);
  for (std::size_t j = 0; j < k; ++j) proj[j] *= 1.0 / inv_sqrt_diag_[j] - inv_tail;
  Vector lift(dim_);
  kernels::dense_mul_vec(basis_, proj, lift);
  kernels::axpy(1.0, lift, out);
}

Vector Preconditioner::apply_inv_sqrt(const Vector& v) const {
  Vector out(dim_);
  apply_inv_sqrt(std::span<const double>(v), std::span<double>(out));
  return out;
}

Vector Preconditioner::apply_sqrt(const Vector& v) const {
  Vector out(dim_);
  apply_sqrt(std::span<const double>(v), std::span<double>(out));
  return out;
}

double Preconditioner::inv_sqrt_sq_norm(double v_sq_norm, std::span<const double> proj) const {
  if (proj.size() != rank()) throw DimensionError("inv_sqrt_sq_norm: projection length mismatch");
  double s = tail_coeff_ * tail_coeff_ * v_sq_norm;
  for (std::size_t j = 0; j < proj.size(); ++j) {
    const double dj = inv_sqrt_diag_[j];
    s += (dj * dj - tail_coeff_ * tail_coeff_) * proj[j] * proj[j];
  }
  return s;
}

Preconditioner build_sketched(const SketchedSvd& sv, double lambda) {
  check_lambda(lambda);
  if (sv.k < 1) throw ParameterError("build_sketched: factors must have rank >= 1");
  Preconditioner p;
  p.kind_ = Preconditioner::Kind::Sketched;
  p.dim_ = sv.left.rows();
  p.lambda_ = lambda;
  p.basis_ = sv.left;
  p.inv_sqrt_diag_.resize(sv.k);
  for (std::size_t j = 0; j < sv.k; ++j) {
    const double s = sv.singular_values[j];
    p.inv_sqrt_diag_[j] = 1.0 / std::sqrt(s * s + lambda);
  }
  p.tail_coeff_ = p.inv_sqrt_diag_.back();
  p.validate();
  return p;
}

Preconditioner build_exact(const SketchedSvd& sv, double lambda) {
  Preconditioner p = build_sketched(sv, lambda);
  p.kind_ = Preconditioner::Kind::Exact;
  return p;
}

Preconditioner build_optimal(const DataMatrix& data, double lambda) {
  check_lambda(lambda);
  const std::size_t d = data.rows();
  if (d > kConditionGuardDim) {
    throw ScaleGuardError("build_optimal: dimension exceeds the dense diagnostic guard");
  }
  EigResult eig = sym_eigs(data.gram());
  Preconditioner p;
  p.kind_ = Preconditioner::Kind::Optimal;
  p.dim_ = d;
  p.lambda_ = lambda;
  p.basis_ = std::move(eig.vectors);
  p.inv_sqrt_diag_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    p.inv_sqrt_diag_[j] = 1.0 / std::sqrt(std::max(eig.values[j], 0.0) + lambda);
  }
  p.tail_coeff_ = p.inv_sqrt_diag_.back();
  p.validate();
  return p;
}

double avg_condition_number(const SpectrumSummary& spec) {
  if (spec.eigenvalues.empty()) throw InputError("avg_condition_number: empty spectrum");
  const double denom = spec.eigenvalues.back() + spec.lambda;
  if (!(denom > 0.0)) throw InputError("avg_condition_number: lam_min + lambda must be positive");
  double tr = 0.0;
  for (double v : spec.eigenvalues) tr += v + spec.lambda;
  return tr / denom;
}

DenseMatrix conditioned_matrix(const DataMatrix& data, double lambda, const Preconditioner& p) {
  const std::size_t d = data.rows();
  if (p.dim() != d) throw DimensionError("conditioned_matrix: dimension mismatch");
  DenseMatrix b = data.gram();
  for (std::size_t i = 0; i < d; ++i) b(i, i) += lambda;
  // M = P^{-1/2} B P^{-1/2}; apply to columns, then to columns of the
  // transpose (B symmetric).
  DenseMatrix half(d, d);
  for (std::size_t j = 0; j < d; ++j) p.apply_inv_sqrt(b.col(j), half.col(j));
  DenseMatrix half_t = half.transposed();
  DenseMatrix m(d, d);
  for (std::size_t j = 0; j < d; ++j) p.apply_inv_sqrt(half_t.col(j), m.col(j));
  // Symmetrize the round-off so the eigensolver's symmetry check passes.
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = j + 1; i < d; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

double conditioned_condition_number(const DataMatrix& data, double lambda,
                                    const Preconditioner& p) {
  if (data.rows() > kConditionGuardDim) {
    throw ScaleGuardError("conditioned_condition_number: dimension exceeds the dense guard");
  }
  DenseMatrix m = conditioned_matrix(data, lambda, p);
  EigResult eig = sym_eigs(m);
  double tr = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) tr += m(i, i);
  return tr / eig.values.back();
}

double theoretical_ratio(const SpectrumSummary& spec, std::size_t k) {
  const std::size_t d = spec.dim();
  if (k < 1 || k > d) throw ParameterError("theoretical_ratio: k must satisfy 1 <= k <= d");
  // Written as (head + tail) / (k*lam_k + tail) so that k = 1 gives 1.0
  // bit-exactly.
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < k; ++i) head += spec.eigenvalues[i];
  for (std::size_t i = k; i < d; ++i) tail += spec.eigenvalues[i];
  const double denom = static_cast<double>(k) * spec.eigenvalues[k - 1] + tail;
  if (denom == 0.0) throw DegenerateSpectrumError("theoretical_ratio: zero denominator");
  return (head + tail) / denom;
}

}  // namespace skridge
