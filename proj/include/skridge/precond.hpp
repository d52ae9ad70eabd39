#pragma once

#include <cstddef>
#include <span>

#include "skridge/data_matrix.hpp"
#include "skridge/dense_matrix.hpp"
#include "skridge/sketch.hpp"

namespace skridge {

/// Eigenvalues of the correlation matrix plus the regularization strength.
struct SpectrumSummary {
  Vector eigenvalues;  // descending, >= 0
  double lambda = 0.0;

  SpectrumSummary() = default;
  SpectrumSummary(Vector eigs, double lam);
  std::size_t dim() const { return eigenvalues.size(); }
};

/// Structured rank-k preconditioner map.
///
/// Applies as  P^{-1/2} v = c*v + U (diag(inv_sqrt) - c) U^T v,  i.e. the
/// top-k directions are whitened individually and the orthogonal complement
/// is scaled uniformly by the tail coefficient c = inv_sqrt.back(). No d x d
/// matrix is ever formed; apply cost is O(d k).
class Preconditioner {
 public:
  enum class Kind { Sketched, Exact, Identity, Optimal };

  static Preconditioner identity(std::size_t dim, double lambda);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return inv_sqrt_diag_.size(); }
  double lambda() const { return lambda_; }
  double tail_coeff() const { return tail_coeff_; }
  const Vector& inv_sqrt_diag() const { return inv_sqrt_diag_; }
  const DenseMatrix& basis() const { return basis_; }

  /// Smallest eigenvalue of P^{-1}: 1/(sigma~_1^2 + lambda).
  double min_inv_eigenvalue() const;

  void apply_inv_sqrt(std::span<const double> v, std::span<double> out) const;
  void apply_sqrt(std::span<const double> v, std::span<double> out) const;
  Vector apply_inv_sqrt(const Vector& v) const;
  Vector apply_sqrt(const Vector& v) const;

  /// ||P^{-1/2} v||^2 from ||v||^2 and the basis projections U^T v, in O(k).
  double inv_sqrt_sq_norm(double v_sq_norm, std::span<const double> proj) const;

  friend Preconditioner build_sketched(const SketchedSvd& sv, double lambda);
  friend Preconditioner build_exact(const SketchedSvd& sv, double lambda);
  friend Preconditioner build_optimal(const DataMatrix& data, double lambda);

 private:
  Preconditioner() = default;
  void validate() const;

  Kind kind_ = Kind::Identity;
  std::size_t dim_ = 0;
  DenseMatrix basis_;      // d x k, column-orthonormal (empty for identity)
  Vector inv_sqrt_diag_;   // 1/sqrt(sigma~_i^2 + lambda), non-decreasing
  double tail_coeff_ = 1.0;  // equals inv_sqrt_diag_.back() when rank > 0
  double lambda_ = 0.0;
};

/// Preconditioner from sketched rank-k factors.
Preconditioner build_sketched(const SketchedSvd& sv, double lambda);

/// Same construction from exact factors (oracle/testing path).
Preconditioner build_exact(const SketchedSvd& sv, double lambda);

/// Full whitening map from the dense spectrum of the correlation matrix;
/// the gold-standard diagnostic, cost O(d^3), test scale only.
Preconditioner build_optimal(const DataMatrix& data, double lambda);

/// Average condition number of C + lambda I from its spectrum:
/// sum_i (lam_i + lambda) / (lam_min + lambda).
double avg_condition_number(const SpectrumSummary& spec);

/// Average condition number of the conditioned matrix
/// M = P^{-1/2} (C + lambda I) P^{-1/2}, computed densely: tr(M)/lambda_min(M).
/// Diagnostic only; guarded at d <= 2000.
double conditioned_condition_number(const DataMatrix& data, double lambda,
                                    const Preconditioner& p);

/// Predicted iteration-count ratio of rank-k preconditioning:
/// sum_i lam_i / (k*lam_k + sum_{i>k} lam_i). Scale invariant; lambda unused.
double theoretical_ratio(const SpectrumSummary& spec, std::size_t k);

/// Dense materialization of M = P^{-1/2} (C + lambda I) P^{-1/2}
/// (shared by the condition-number diagnostic and tests).
DenseMatrix conditioned_matrix(const DataMatrix& data, double lambda, const Preconditioner& p);

}  // namespace skridge
