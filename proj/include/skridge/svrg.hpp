#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "skridge/dense_matrix.hpp"

namespace skridge {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double objective = 0.0;
  std::optional<double> suboptimality;  // objective - reference, when known
  double elapsed_ms = 0.0;              // since solve start
};

using ConvergenceTrace = std::vector<EpochRecord>;

/// Raised when the objective blows up (non-finite, or more than 1e6 times
/// its initial value); carries the trace recorded so far.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string what, ConvergenceTrace trace)
      : std::runtime_error(std::move(what)), trace_(std::move(trace)) {}
  const ConvergenceTrace& trace() const { return trace_; }

 private:
  ConvergenceTrace trace_;
};

enum class SvrgMode { Theoretical, Tuned };

struct SvrgConfig {
  std::size_t epochs = 1;        // S
  std::size_t epoch_length = 1;  // m
  double step_size = 0.1;        // eta
  std::uint64_t seed = 0;
  SvrgMode mode = SvrgMode::Tuned;
};

class FiniteSumProblem;

/// Per-epoch iterate owned by the problem. The engine drives it through one
/// epoch: begin at the snapshot, take m variance-reduced steps, read back
/// the average of the inner iterates. Problems with structured gradients
/// (sparse plus low-rank) override it to keep each step cheap.
class EpochState {
 public:
  virtual ~EpochState() = default;
  virtual void begin_epoch(const Vector& snapshot, const Vector& full_grad) = 0;
  /// w <- w - eta * ((grad_i(w) - grad_i(snapshot)) * inv_nq + full_grad),
  /// then accumulate w into the running epoch average.
  virtual void step(std::size_t index, double eta, double inv_nq) = 0;
  /// Average of the m inner iterates, densely.
  virtual void epoch_average(Vector& out) = 0;
};

/// Finite-sum objective F(w) = (1/N) sum_i f_i(w) with per-component
/// smoothness constants. Component gradients feed the stochastic steps;
/// the full gradient anchors each epoch.
class FiniteSumProblem {
 public:
  virtual ~FiniteSumProblem() = default;

  virtual std::size_t component_count() const = 0;  // N
  virtual std::size_t dimension() const = 0;
  virtual const Vector& betas() const = 0;
  virtual double strong_convexity() const = 0;  // alpha (may be a lower bound)
  virtual double objective(const Vector& w) const = 0;
  virtual void full_gradient(const Vector& w, Vector& out) const = 0;
  virtual void component_gradient(std::size_t i, const Vector& w, Vector& out) const = 0;

  virtual std::unique_ptr<EpochState> make_epoch_state() const;
};

/// Finite sum assembled from callables (tests, toy problems).
class CallbackFiniteSum : public FiniteSumProblem {
 public:
  using ComponentGradient = std::function<void(std::size_t, const Vector&, Vector&)>;
  using Objective = std::function<double(const Vector&)>;

  CallbackFiniteSum(std::size_t dimension, Vector betas, double alpha,
                    ComponentGradient component_gradient, Objective objective);

  std::size_t component_count() const override { return betas_.size(); }
  std::size_t dimension() const override { return dimension_; }
  const Vector& betas() const override { return betas_; }
  double strong_convexity() const override { return alpha_; }
  double objective(const Vector& w) const override { return objective_(w); }
  void full_gradient(const Vector& w, Vector& out) const override;
  void component_gradient(std::size_t i, const Vector& w, Vector& out) const override;

 private:
  std::size_t dimension_;
  Vector betas_;
  double alpha_;
  ComponentGradient component_gradient_;
  Objective objective_;
};

/// Cumulative sampling table from smoothness weights: q_i = beta_i / sum(beta).
/// Final entry pinned to exactly 1.
Vector make_cumulative_weights(const Vector& betas);

/// Smallest index whose cumulative weight is >= u (binary search).
/// The table must be non-decreasing and end at 1 within 1e-12.
std::size_t sample_index(const Vector& cumulative_weights, double u);

/// out = (grad_i(w) - grad_i(snapshot)) * inv_nq + full_grad.
/// The same formula the dense epoch state steps with; exposed so tests can
/// enumerate its exact expectation.
void variance_reduced_direction(const FiniteSumProblem& p, std::size_t i, const Vector& w,
                                const Vector& snapshot, const Vector& full_grad, double inv_nq,
                                Vector& out);
void variance_reduced_direction(const FiniteSumProblem& p, std::size_t i, const Vector& w,
                                const Vector& snapshot, const Vector& full_grad, double inv_nq,
                                Vector& out, Vector& scratch);

struct SvrgResult {
  Vector iterate;
  ConvergenceTrace trace;
};

/// Epoch-based variance-reduced solve.
///
/// Per epoch: snapshot the iterate, compute the full gradient, run m inner
/// steps sampling component i with probability beta_i / sum(beta), with the
/// variance-reduced direction divided by N*q_i (unbiased), then advance to
/// the average of the inner iterates. Records one trace entry per epoch.
SvrgResult svrg_solve(const FiniteSumProblem& p, const SvrgConfig& cfg, const Vector& w0,
                      std::optional<double> reference_value = std::nullopt);

/// Parameter recipe: S = max(1, ceil(ln(w0_gap / epsilon))),
/// m = ceil(mean(beta) / alpha), eta = 0.1 / mean(beta).
SvrgConfig theoretical_params(const FiniteSumProblem& p, double w0_gap, double epsilon);

/// Mean smoothness constant (the quantity step-size grids are scaled by).
double mean_beta(const FiniteSumProblem& p);

}  // namespace skridge
