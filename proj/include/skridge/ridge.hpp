#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>

#include "skridge/data_matrix.hpp"
#include "skridge/precond.hpp"
#include "skridge/sketch.hpp"
#include "skridge/svrg.hpp"

namespace skridge {

/// Regularized least squares over columns x_i of `data`:
///   L(w) = (1/n) sum_i (w^T x_i - y_i)^2 / 2 + (lambda/2) ||w||^2.
struct RidgeProblem {
  DataMatrix data;  // d x n, columns are the points
  Vector labels;    // length n
  double lambda = 0.0;

  RidgeProblem(DataMatrix d, Vector y, double lam);
  std::size_t dim() const { return data.rows(); }
  std::size_t count() const { return data.cols(); }
};

double objective(const RidgeProblem& p, const Vector& w);

/// Full gradient of the ridge objective: X (X^T w - y)/n + lambda w.
Vector objective_gradient(const RidgeProblem& p, const Vector& w);

/// The data matrix scaled by 1/sqrt(n), whose Gram matrix is the empirical
/// correlation matrix (storage shared, no copy).
DataMatrix scaled_design(const RidgeProblem& p);

/// Plain (n+d)-component decomposition of the ridge objective:
/// data components (n+d)/n * (w^T x_i - y_i)^2 / 2 and regularizer
/// components lambda (n+d) * w_j^2 / 2, so the component average equals L.
class RidgeFiniteSum final : public FiniteSumProblem {
 public:
  explicit RidgeFiniteSum(RidgeProblem p);

  std::size_t component_count() const override { return n_ + d_; }
  std::size_t dimension() const override { return d_; }
  const Vector& betas() const override { return betas_; }
  double strong_convexity() const override { return problem_.lambda; }
  double objective(const Vector& w) const override;
  void full_gradient(const Vector& w, Vector& out) const override;
  void component_gradient(std::size_t i, const Vector& w, Vector& out) const override;

  const RidgeProblem& problem() const { return problem_; }

 private:
  RidgeProblem problem_;
  std::size_t n_, d_;
  Vector betas_;
};

std::shared_ptr<RidgeFiniteSum> ridge_components(const RidgeProblem& p);

enum class ApplyMode { Dense, Lazy, Auto };

/// Dense mode materializes every preconditioned point; past this many
/// entries it is refused and callers should use lazy mode.
inline constexpr std::size_t kDenseModeMaxEntries = 200'000'000;

/// Preconditioned decomposition: components use the transformed points
/// P^{-1/2} x_i and the transformed coordinate directions P^{-1/2} e_j.
///
/// Dense mode materializes the transformed points once (O(n d k) setup,
/// O(n d) memory). Lazy mode keeps the data sparse and works with the
/// cached basis projections of each point, representing the inner iterate
/// as a dense part plus a basis part so a step costs O(nnz(x_i) + d + k);
/// the iterate projection is re-derived from scratch at every epoch
/// snapshot and its drift since the refresh is tracked.
/// Transformed coordinate directions are never materialized (together they
/// would be a d x d matrix); their gradients go through the basis rows.
class PreconditionedRidge final : public FiniteSumProblem {
 public:
  PreconditionedRidge(RidgeProblem p, Preconditioner precond, ApplyMode mode);

  std::size_t component_count() const override { return n_ + d_; }
  std::size_t dimension() const override { return d_; }
  const Vector& betas() const override { return betas_; }
  double strong_convexity() const override;
  double objective(const Vector& w) const override;
  void full_gradient(const Vector& w, Vector& out) const override;
  void component_gradient(std::size_t i, const Vector& w, Vector& out) const override;
  std::unique_ptr<EpochState> make_epoch_state() const override;

  ApplyMode mode() const { return mode_; }  // Dense or Lazy after resolution
  const Preconditioner& preconditioner() const { return precond_; }
  const RidgeProblem& problem() const { return problem_; }
  /// Basis projections of the points, one k-column per point.
  const DenseMatrix& point_projections() const { return proj_; }
  /// Largest ||z - U^T w|| / ||w|| seen at an epoch boundary so far.
  double max_projection_drift() const { return *max_drift_; }

  /// Override the strong-convexity lower bound fed to parameter recipes.
  void set_strong_convexity(double alpha);

 private:
  friend class LazyEpochState;

  double point_inner(std::size_t i, const Vector& w, const Vector& basis_proj) const;

  RidgeProblem problem_;
  Preconditioner precond_;
  ApplyMode mode_;
  std::size_t n_, d_, k_;
  double data_coef_, reg_coef_;  // (n+d)/n and lambda*(n+d)

  DenseMatrix proj_;        // k x n, column i = U^T x_i
  DenseMatrix basis_rows_;  // k x d, column j = row j of U
  DenseMatrix transformed_;  // dense mode only: d x n, column i = P^{-1/2} x_i
  Vector betas_;
  std::optional<double> alpha_override_;
  std::shared_ptr<double> max_drift_;  // written by epoch states
};

std::shared_ptr<PreconditionedRidge> preconditioned_components(const RidgeProblem& p,
                                                               const Preconditioner& precond,
                                                               ApplyMode mode = ApplyMode::Auto);

struct SketchedSolveDiagnostics {
  Vector singular_values;  // sketched values used by the preconditioner
  std::size_t k_used = 0;
  std::size_t q_used = 0;
  bool rank_reduced = false;
  ApplyMode mode = ApplyMode::Dense;
  double beta_hat = 0.0;
  double sketch_ms = 0.0;
  double precompute_ms = 0.0;
  double solve_ms = 0.0;
  double max_projection_drift = 0.0;
};

struct SketchedSolveResult {
  Vector iterate;  // in original coordinates
  ConvergenceTrace trace;
  SketchedSolveDiagnostics diagnostics;
};

/// End-to-end pipeline: sketch the scaled design matrix at rank k
/// (eps' = 1/2), build the structured preconditioner, assemble the
/// preconditioned components, run the variance-reduced solve from 0 in
/// preconditioned coordinates, and map the result back through P^{-1/2}.
/// Trace objectives equal the original-coordinate objective of the mapped
/// iterates, so they compare directly against an unpreconditioned run.
SketchedSolveResult sketched_preconditioned_svrg(const RidgeProblem& p, std::size_t k,
                                                 const SvrgConfig& cfg, std::uint64_t sketch_seed,
                                                 ApplyMode mode = ApplyMode::Auto,
                                                 std::optional<double> reference_value = std::nullopt);

}  // namespace skridge
