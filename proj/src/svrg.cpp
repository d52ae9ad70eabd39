#include "skridge/svrg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "skridge/errors.hpp"
#include "skridge/kernels.hpp"
#include "skridge/random.hpp"

namespace skridge {

namespace {

/// Default iterate: dense vector, gradients evaluated through the problem's
/// component_gradient.
class DenseEpochState final : public EpochState {
 public:
  explicit DenseEpochState(const FiniteSumProblem& p)
      : problem_(p),
        w_(p.dimension()),
        sum_(p.dimension()),
        dir_(p.dimension()),
        scratch_(p.dimension()),
        snapshot_(p.dimension()),
        full_grad_(p.dimension()) {}

  void begin_epoch(const Vector& snapshot, const Vector& full_grad) override {
    snapshot_ = snapshot;
    full_grad_ = full_grad;
    w_ = snapshot;
    std::fill(sum_.begin(), sum_.end(), 0.0);
    steps_ = 0;
  }

  void step(std::size_t index, double eta, double inv_nq) override {
    variance_reduced_direction(problem_, index, w_, snapshot_, full_grad_, inv_nq, dir_,
                               scratch_);
    kernels::axpy(-eta, dir_, w_);
    kernels::axpy(1.0, w_, sum_);
    ++steps_;
  }

  void epoch_average(Vector& out) override {
    out = sum_;
    kernels::scal(1.0 / static_cast<double>(steps_), out);
  }

 private:
  const FiniteSumProblem& problem_;
  Vector w_, sum_, dir_, scratch_, snapshot_, full_grad_;
  std::size_t steps_ = 0;
};

}  // namespace

std::unique_ptr<EpochState> FiniteSumProblem::make_epoch_state() const {
  return std::make_unique<DenseEpochState>(*this);
}

CallbackFiniteSum::CallbackFiniteSum(std::size_t dimension, Vector betas, double alpha,
                                     ComponentGradient component_gradient, Objective objective)
    : dimension_(dimension),
      betas_(std::move(betas)),
      alpha_(alpha),
      component_gradient_(std::move(component_gradient)),
      objective_(std::move(objective)) {
  if (betas_.empty()) throw ParameterError("finite sum: component count must be >= 1");
  for (double b : betas_) {
    if (!(b > 0.0)) throw ParameterError("finite sum: betas must be positive");
  }
  if (!(alpha_ > 0.0)) throw ParameterError("finite sum: alpha must be positive");
}

void CallbackFiniteSum::full_gradient(const Vector& w, Vector& out) const {
  out.assign(dimension_, 0.0);
  Vector g(dimension_);
  for (std::size_t i = 0; i < component_count(); ++i) {
    component_gradient_(i, w, g);
    kernels::axpy(1.0 / static_cast<double>(component_count()), g, out);
  }
}

void CallbackFiniteSum::component_gradient(std::size_t i, const Vector& w, Vector& out) const {
  out.assign(dimension_, 0.0);
  component_gradient_(i, w, out);
}

Vector make_cumulative_weights(const Vector& betas) {
  if (betas.empty()) throw InputError("sampling: no weights");
  double total = 0.0;
  for (double b : betas) {
    if (!(b >= 0.0)) throw InputError("sampling: negative weight");
    total += b;
  }
  if (!(total > 0.0)) throw InputError("sampling: zero total weight");
  Vector cum(betas.size());
  double run = 0.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    run += betas[i] / total;
    cum[i] = run;
  }
  cum.back() = 1.0;
  return cum;
}

namespace {

void validate_cumulative(const Vector& cumulative_weights) {
  if (cumulative_weights.empty()) throw InputError("sample_index: empty table");
  double prev = 0.0;
  for (double c : cumulative_weights) {
    if (c < prev) throw InputError("sample_index: table not non-decreasing");
    prev = c;
  }
  if (std::abs(cumulative_weights.back() - 1.0) > 1e-12) {
    throw InputError("sample_index: table must end at 1");
  }
}

std::size_t lookup_index(const Vector& cumulative_weights, double u) {
  auto it = std::lower_bound(cumulative_weights.begin(), cumulative_weights.end(), u);
  if (it == cumulative_weights.end()) --it;  // u == 1 boundary
  return static_cast<std::size_t>(it - cumulative_weights.begin());
}

}  // namespace

std::size_t sample_index(const Vector& cumulative_weights, double u) {
  validate_cumulative(cumulative_weights);
  return lookup_index(cumulative_weights, u);
}

void variance_reduced_direction(const FiniteSumProblem& p, std::size_t i, const Vector& w,
                                const Vector& snapshot, const Vector& full_grad, double inv_nq,
                                Vector& out) {
  Vector scratch(p.dimension());
  variance_reduced_direction(p, i, w, snapshot, full_grad, inv_nq, out, scratch);
}

void variance_reduced_direction(const FiniteSumProblem& p, std::size_t i, const Vector& w,
                                const Vector& snapshot, const Vector& full_grad, double inv_nq,
                                Vector& out, Vector& scratch) {
  p.component_gradient(i, w, out);
  p.component_gradient(i, snapshot, scratch);
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = (out[j] - scratch[j]) * inv_nq + full_grad[j];
  }
}

SvrgResult svrg_solve(const FiniteSumProblem& p, const SvrgConfig& cfg, const Vector& w0,
                      std::optional<double> reference_value) {
  if (cfg.epochs < 1 || cfg.epoch_length < 1) {
    throw ParameterError("svrg: epochs and epoch length must be >= 1");
  }
  if (!(cfg.step_size > 0.0)) throw ParameterError("svrg: step size must be positive");
  if (w0.size() != p.dimension()) throw DimensionError("svrg: start point length mismatch");
  for (double v : w0) {
    if (!std::isfinite(v)) throw InputError("svrg: start point must be finite");
  }

  const std::size_t n_comp = p.component_count();
  const Vector& betas = p.betas();
  const Vector cum = make_cumulative_weights(betas);
  validate_cumulative(cum);  // once; the inner loop uses the raw lookup
  double beta_total = 0.0;
  for (double b : betas) beta_total += b;
  Vector inv_nq(n_comp);
  for (std::size_t i = 0; i < n_comp; ++i) {
    inv_nq[i] = beta_total / (static_cast<double>(n_comp) * betas[i]);
  }

  NormalSampler rng(cfg.seed);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&start] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };

  const double initial_objective = p.objective(w0);
  Vector w = w0;
  Vector full_grad(p.dimension());
  ConvergenceTrace trace;
  trace.reserve(cfg.epochs);
  auto state = p.make_epoch_state();

  for (std::size_t s = 1; s <= cfg.epochs; ++s) {
    p.full_gradient(w, full_grad);
    state->begin_epoch(w, full_grad);
    for (std::size_t t = 0; t < cfg.epoch_length; ++t) {
      const std::size_t i = lookup_index(cum, rng.uniform());
      state->step(i, cfg.step_size, inv_nq[i]);
    }
    state->epoch_average(w);
    const double obj = p.objective(w);
    EpochRecord rec;
    rec.epoch = s;
    rec.objective = obj;
    if (reference_value) rec.suboptimality = obj - *reference_value;
    rec.elapsed_ms = elapsed_ms();
    trace.push_back(rec);
    const bool blew_up = !std::isfinite(obj) ||
                         (initial_objective > 0.0 && obj > 1e6 * initial_objective);
    if (blew_up) {
      throw DivergenceError("svrg: objective diverged at epoch " + std::to_string(s),
                            std::move(trace));
    }
  }
  return SvrgResult{std::move(w), std::move(trace)};
}

double mean_beta(const FiniteSumProblem& p) {
  double total = 0.0;
  for (double b : p.betas()) total += b;
  return total / static_cast<double>(p.component_count());
}

SvrgConfig theoretical_params(const FiniteSumProblem& p, double w0_gap, double epsilon) {
  if (!(epsilon > 0.0) || !(w0_gap > 0.0)) {
    throw ParameterError("theoretical_params: w0_gap and epsilon must be positive");
  }
  const double beta_hat = mean_beta(p);
  SvrgConfig cfg;
  cfg.mode = SvrgMode::Theoretical;
  cfg.epochs = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::log(w0_gap / epsilon))));
  cfg.epoch_length =
      static_cast<std::size_t>(std::max(1.0, std::ceil(beta_hat / p.strong_convexity())));
  cfg.step_size = 0.1 / beta_hat;
  return cfg;
}

}  // namespace skridge
