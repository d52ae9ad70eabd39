#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "skridge/precond.hpp"
#include "skridge/ridge.hpp"

namespace skridge {

/// Exact minimizer and minimum value of the ridge objective, from the
/// normal equations (C + lambda I) w = X y / n. Dense Cholesky up to
/// d <= 5000; conjugate gradient to machine-level residual beyond that.
struct ReferenceSolution {
  Vector minimizer;
  double minimum = 0.0;
};
ReferenceSolution reference_minimum(const RidgeProblem& p);

/// Conjugate-gradient path of the reference solve (matrix-free; also used
/// directly by tests).
Vector reference_minimum_cg(const RidgeProblem& p, double rel_residual_tol,
                            std::size_t max_iterations);

struct BenchConfig {
  double lambda = 1e-6;
  std::size_t k = 30;
  std::size_t epochs = 20;
  std::optional<double> eta;  // fixed step size; unset means tune on the grid
  std::vector<std::uint64_t> seeds = {0};
  ApplyMode mode = ApplyMode::Auto;
};

struct ConvergenceRow {
  std::string method;  // "svrg" or "sketched-svrg"
  std::uint64_t seed = 0;
  std::size_t epoch = 0;  // 0 is the shared start point
  double suboptimality = 0.0;
  double elapsed_ms = 0.0;
};

/// Step-size grid used when BenchConfig::eta is unset: (2^j / beta_hat)
/// for j in -3..3, evaluated per method and per seed; the grid value with
/// the lowest final suboptimality wins. Runs that diverge are discarded.
std::vector<double> eta_grid(double beta_hat);

/// Convergence experiment: both methods on one instance, one row per
/// (method, seed, epoch), suboptimality measured against a single shared
/// reference solve. Epoch length is 2(n+d).
std::vector<ConvergenceRow> run_convergence(const RidgeProblem& p, const BenchConfig& cfg);

struct RatioRow {
  std::size_t k = 0;
  double ratio = 0.0;
};

/// Predicted speed-up ratio for k = 1..k_max from a spectrum.
std::vector<RatioRow> run_ratio_curve(const SpectrumSummary& spec, std::size_t k_max);

/// Spectrum of the correlation matrix of a dataset (exact decomposition,
/// test scale; all d eigenvalues, zero-padded past the rank).
SpectrumSummary dataset_spectrum(const RidgeProblem& p);

void write_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out);
void write_csv(const std::vector<RatioRow>& rows, std::ostream& out);

/// Locale-independent formatting used for every CSV float field.
std::string format_double(double v);

}  // namespace skridge
