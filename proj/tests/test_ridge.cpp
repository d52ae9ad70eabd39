#include <cmath>

#include <doctest.h>

#include "skridge/bench.hpp"
#include "skridge/errors.hpp"
#include "skridge/factorize.hpp"
#include "skridge/kernels.hpp"
#include "skridge/precond.hpp"
#include "skridge/ridge.hpp"
#include "skridge/sketch.hpp"
#include "support/oracles.hpp"

using namespace skridge;

namespace {

RidgeProblem sparse_problem(std::size_t d, std::size_t n, double lambda, std::uint64_t seed) {
  SparseMatrix s = oracles::random_sparse(d, n, 0.08, seed);
  Vector y = oracles::random_vector(n, seed + 1);
  return RidgeProblem(DataMatrix(std::move(s)), std::move(y), lambda);
}

RidgeProblem dense_problem(std::size_t d, std::size_t n, double lambda, std::uint64_t seed) {
  DenseMatrix x = gaussian_matrix(d, n, seed);
  Vector y = oracles::random_vector(n, seed + 1);
  return RidgeProblem(DataMatrix(std::move(x)), std::move(y), lambda);
}

Preconditioner sketch_preconditioner(const RidgeProblem& p, std::size_t k, std::uint64_t seed) {
  LanczosConfig cfg;
  cfg.k = k;
  cfg.seed = seed;
  return build_sketched(block_lanczos(scaled_design(p), cfg), p.lambda);
}

}  // namespace

TEST_SUITE("ridge") {

TEST_CASE("objective at zero is the mean squared label") {
  RidgeProblem p = dense_problem(6, 9, 0.5, 3);
  double want = 0.0;
  for (double y : p.labels) want += y * y;
  want /= 2.0 * 9.0;
  CHECK(objective(p, Vector(6, 0.0)) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("objective on a hand-solved single-point instance") {
  // One point e1 in R^2, label 1, lambda 1, w = 0.5 e1:
  // (0.5 - 1)^2/2 + 0.5*0.25 = 0.25.
  DenseMatrix x(2, 1);
  x(0, 0) = 1.0;
  RidgeProblem p(DataMatrix(std::move(x)), {1.0}, 1.0);
  CHECK(objective(p, {0.5, 0.0}) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("movement orthogonal to the data changes only the penalty term") {
  DenseMatrix x(3, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 2.0;  // span{e1, e2}; e3 is orthogonal to every point
  RidgeProblem p(DataMatrix(std::move(x)), {0.3, -0.7}, 0.25);
  Vector w = {0.4, -0.2, 0.0};
  Vector w2 = w;
  w2[2] = 5.0;
  const double diff = objective(p, w2) - objective(p, w);
  CHECK(diff == doctest::Approx(0.5 * 0.25 * 25.0).epsilon(1e-12));
}

TEST_CASE("ridge components average back to the objective") {
  RidgeProblem p = sparse_problem(12, 30, 0.05, 5);
  auto fs = ridge_components(p);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const Vector w = oracles::random_vector(12, 100 + t);
    // Component values, averaged directly.
    double avg = 0.0;
    const double dc = 42.0 / 30.0;
    for (std::size_t i = 0; i < 30; ++i) {
      const double e = p.data.col_dot(i, w) - p.labels[i];
      avg += dc * 0.5 * e * e;
    }
    for (std::size_t j = 0; j < 12; ++j) avg += p.lambda * 42.0 * 0.5 * w[j] * w[j];
    avg /= 42.0;
    CHECK(avg == doctest::Approx(objective(p, w)).epsilon(1e-12));
  }
}

TEST_CASE("regularizer component gradient is a scaled coordinate direction") {
  RidgeProblem p = dense_problem(5, 8, 0.2, 7);
  auto fs = ridge_components(p);
  const Vector w = oracles::random_vector(5, 11);
  Vector g(5);
  fs->component_gradient(8, w, g);  // first regularizer component
  CHECK(g[0] == doctest::Approx(0.2 * 13.0 * w[0]).epsilon(1e-13));
  for (std::size_t j = 1; j < 5; ++j) CHECK(g[j] == 0.0);
}

TEST_CASE("ridge full gradient matches finite differences") {
  RidgeProblem p = dense_problem(7, 14, 0.15, 13);
  auto fs = ridge_components(p);
  const Vector w = oracles::random_vector(7, 17);
  Vector grad(7);
  fs->full_gradient(w, grad);
  Vector fd = oracles::finite_difference_gradient(
      [&](const Vector& v) { return objective(p, v); }, w, 1e-5);
  for (std::size_t j = 0; j < 7; ++j) CHECK(std::abs(grad[j] - fd[j]) < 1e-6);
}

TEST_CASE("identity preconditioner reduces to the plain components") {
  RidgeProblem p = sparse_problem(10, 25, 0.1, 19);
  auto plain = ridge_components(p);
  auto pre = preconditioned_components(p, Preconditioner::identity(10, p.lambda),
                                       ApplyMode::Dense);
  REQUIRE(plain->betas().size() == pre->betas().size());
  for (std::size_t i = 0; i < plain->betas().size(); ++i) {
    CHECK(pre->betas()[i] == doctest::Approx(plain->betas()[i]).epsilon(1e-14));
  }
  const Vector w = oracles::random_vector(10, 23);
  Vector a(10), b(10);
  for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{24}, std::size_t{30}}) {
    plain->component_gradient(i, w, a);
    pre->component_gradient(i, w, b);
    for (std::size_t j = 0; j < 10; ++j) CHECK(b[j] == doctest::Approx(a[j]).epsilon(1e-13));
  }
  CHECK(pre->objective(w) == doctest::Approx(plain->objective(w)).epsilon(1e-13));
  CHECK(pre->strong_convexity() == doctest::Approx(p.lambda));
}

TEST_CASE("preconditioned objective is the original at the mapped point") {
  RidgeProblem p = dense_problem(14, 40, 1e-3, 29);
  Preconditioner precond = sketch_preconditioner(p, 4, 31);
  auto pre = preconditioned_components(p, precond, ApplyMode::Dense);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const Vector wt = oracles::random_vector(14, 200 + t);
    const double chained = objective(p, precond.apply_inv_sqrt(wt));
    CHECK(pre->objective(wt) == doctest::Approx(chained).epsilon(1e-10));
  }
}

TEST_CASE("preconditioned components average back to their objective") {
  RidgeProblem p = sparse_problem(15, 35, 2e-3, 31);
  Preconditioner precond = sketch_preconditioner(p, 4, 33);
  auto pre = preconditioned_components(p, precond, ApplyMode::Dense);
  const std::size_t n = 35, d = 15;
  const double dc = static_cast<double>(n + d) / n;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const Vector w = oracles::random_vector(d, 500 + t);
    double avg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Vector xi(d, 0.0);
      p.data.col_axpy(i, 1.0, xi);
      const double e = kernels::dot(w, precond.apply_inv_sqrt(xi)) - p.labels[i];
      avg += dc * 0.5 * e * e;
    }
    for (std::size_t j = 0; j < d; ++j) {
      Vector ej(d, 0.0);
      ej[j] = 1.0;
      const double wb = kernels::dot(w, precond.apply_inv_sqrt(ej));
      avg += p.lambda * static_cast<double>(n + d) * 0.5 * wb * wb;
    }
    avg /= static_cast<double>(n + d);
    const double want = pre->objective(w);
    CHECK(std::abs(avg - want) <= 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("preconditioned full gradient is the mean of component gradients") {
  RidgeProblem p = sparse_problem(12, 28, 1e-3, 131);
  Preconditioner precond = sketch_preconditioner(p, 3, 137);
  for (ApplyMode mode : {ApplyMode::Dense, ApplyMode::Lazy}) {
    auto pre = preconditioned_components(p, precond, mode);
    const Vector w = oracles::random_vector(12, 139);
    Vector full(12), mean(12, 0.0), g(12);
    pre->full_gradient(w, full);
    for (std::size_t i = 0; i < pre->component_count(); ++i) {
      pre->component_gradient(i, w, g);
      kernels::axpy(1.0 / static_cast<double>(pre->component_count()), g, mean);
    }
    for (std::size_t j = 0; j < 12; ++j) CHECK(std::abs(full[j] - mean[j]) < 1e-8);
  }
}

TEST_CASE("theoretical epoch length matches the smoothness ratio for ridge") {
  RidgeProblem p = dense_problem(9, 21, 0.05, 149);
  auto fs = ridge_components(p);
  SvrgConfig cfg = theoretical_params(*fs, 1.0, 0.1);
  // Recompute the recipe's inputs from first principles.
  double beta_sum = 0.0;
  const double dc = 30.0 / 21.0;
  for (std::size_t i = 0; i < 21; ++i) beta_sum += dc * p.data.col_sq_norm(i);
  beta_sum += 9.0 * p.lambda * 30.0;
  const double beta_hat = beta_sum / 30.0;
  CHECK(cfg.epoch_length == static_cast<std::size_t>(std::ceil(beta_hat / p.lambda)));
  CHECK(cfg.step_size == doctest::Approx(0.1 / beta_hat).epsilon(1e-12));
}

TEST_CASE("dense and lazy component gradients agree") {
  RidgeProblem p = sparse_problem(100, 200, 1e-3, 37);
  Preconditioner precond = sketch_preconditioner(p, 8, 41);
  auto dense = preconditioned_components(p, precond, ApplyMode::Dense);
  auto lazy = preconditioned_components(p, precond, ApplyMode::Lazy);
  for (std::size_t i = 0; i < dense->betas().size(); ++i) {
    CHECK(lazy->betas()[i] == dense->betas()[i]);  // same formula, same inputs
  }
  Vector a(100), b(100);
  for (std::uint64_t t = 0; t < 25; ++t) {
    const Vector w = oracles::random_vector(100, 300 + t);
    const std::size_t i = (t * 13) % dense->component_count();
    dense->component_gradient(i, w, a);
    lazy->component_gradient(i, w, b);
    for (std::size_t j = 0; j < 100; ++j) CHECK(std::abs(a[j] - b[j]) < 1e-10);
  }
}

TEST_CASE("preconditioned full gradient matches finite differences") {
  RidgeProblem p = dense_problem(10, 22, 1e-2, 43);
  Preconditioner precond = sketch_preconditioner(p, 3, 47);
  for (ApplyMode mode : {ApplyMode::Dense, ApplyMode::Lazy}) {
    auto pre = preconditioned_components(p, precond, mode);
    const Vector w = oracles::random_vector(10, 53);
    Vector grad(10);
    pre->full_gradient(w, grad);
    Vector fd = oracles::finite_difference_gradient(
        [&](const Vector& v) { return pre->objective(v); }, w, 1e-5);
    for (std::size_t j = 0; j < 10; ++j) CHECK(std::abs(grad[j] - fd[j]) < 1e-6);
  }
}

TEST_CASE("mean preconditioned smoothness equals the conditioned trace") {
  RidgeProblem p = dense_problem(24, 60, 5e-3, 59);
  Preconditioner precond = sketch_preconditioner(p, 6, 61);
  auto pre = preconditioned_components(p, precond, ApplyMode::Dense);
  DenseMatrix m = conditioned_matrix(scaled_design(p), p.lambda, precond);
  double tr = 0.0;
  for (std::size_t i = 0; i < 24; ++i) tr += m(i, i);
  CHECK(mean_beta(*pre) == doctest::Approx(tr).epsilon(1e-8));
}

TEST_CASE("preconditioned curvature equals the conditioned matrix") {
  RidgeProblem p = dense_problem(9, 18, 2e-2, 67);
  Preconditioner precond = sketch_preconditioner(p, 3, 71);
  auto pre = preconditioned_components(p, precond, ApplyMode::Dense);
  DenseMatrix want = conditioned_matrix(scaled_design(p), p.lambda, precond);
  Vector grad(9);
  DenseMatrix hess = oracles::finite_difference_hessian(
      [&](const Vector& v) {
        Vector g(9);
        pre->full_gradient(v, g);
        return g;
      },
      oracles::random_vector(9, 73), 1e-4);
  CHECK(oracles::frobenius_diff(hess, want) < 1e-5 * oracles::frobenius(want));
}

TEST_CASE("dense mode scale guard directs callers to lazy") {
  // 20001 x 10001 would need 2.0e8+ materialized entries.
  SparseMatrix::Builder builder(20001, 10001);
  for (std::size_t j = 0; j < 10001; j += 97) builder.add(j % 20001, j, 1.0);
  RidgeProblem p(DataMatrix(builder.build()), Vector(10001, 0.0), 1e-3);
  SketchedSvd sv;
  sv.left = DenseMatrix(20001, 1);
  sv.left(0, 0) = 1.0;
  sv.singular_values = {1.0};
  sv.right = DenseMatrix(10001, 1);
  sv.k = 1;
  Preconditioner precond = build_sketched(sv, p.lambda);
  CHECK_THROWS_AS(preconditioned_components(p, precond, ApplyMode::Dense), ScaleGuardError);
  auto lazy = preconditioned_components(p, precond, ApplyMode::Auto);
  CHECK(lazy->mode() == ApplyMode::Lazy);
}

TEST_CASE("dense and lazy traces coincide for the same seed") {
  RidgeProblem p = sparse_problem(60, 150, 1e-4, 79);
  Preconditioner precond = sketch_preconditioner(p, 6, 83);
  SvrgConfig cfg;
  cfg.epochs = 3;
  cfg.epoch_length = 2 * (150 + 60);
  cfg.seed = 89;
  auto dense = preconditioned_components(p, precond, ApplyMode::Dense);
  auto lazy = preconditioned_components(p, precond, ApplyMode::Lazy);
  cfg.step_size = 0.5 / mean_beta(*dense);
  Vector w0(60, 0.0);
  SvrgResult rd = svrg_solve(*dense, cfg, w0);
  SvrgResult rl = svrg_solve(*lazy, cfg, w0);
  REQUIRE(rd.trace.size() == rl.trace.size());
  for (std::size_t s = 0; s < rd.trace.size(); ++s) {
    CHECK(std::abs(rd.trace[s].objective - rl.trace[s].objective) < 1e-8);
  }
  for (std::size_t j = 0; j < 60; ++j) CHECK(std::abs(rd.iterate[j] - rl.iterate[j]) < 1e-8);
  CHECK(lazy->max_projection_drift() < 1e-8);
}

TEST_CASE("pipeline maps the preconditioned solution back consistently") {
  RidgeProblem p = dense_problem(20, 50, 1e-3, 97);
  SvrgConfig cfg;
  cfg.epochs = 4;
  cfg.epoch_length = 140;
  cfg.step_size = 0.02;
  SketchedSolveResult res = sketched_preconditioned_svrg(p, 5, cfg, 101);
  // The trace objective of the last epoch is the original objective of the
  // mapped-back iterate.
  CHECK(objective(p, res.iterate) == doctest::Approx(res.trace.back().objective).epsilon(1e-10));
  CHECK(res.diagnostics.k_used == 5);
  CHECK(res.diagnostics.q_used >= 2);
}

TEST_CASE("exactly low-rank data whitens to a small condition number") {
  const std::size_t d = 30, n = 60, r = 5;
  DenseMatrix u = orthonormalize(gaussian_matrix(d, r, 103));
  DenseMatrix v = orthonormalize(gaussian_matrix(n, r, 104));
  DenseMatrix scaled(n, r);
  for (std::size_t j = 0; j < r; ++j) {
    Vector col(v.col(j).begin(), v.col(j).end());
    kernels::scal(1.0 / static_cast<double>(j + 1), col);
    scaled.set_col(j, col);
  }
  DenseMatrix x;
  kernels::dense_mul_mat(u, scaled.transposed(), x);
  // lambda of the order of k*lambda_k, where the whitened condition number
  // collapses to about d.
  RidgeProblem p(DataMatrix(std::move(x)), oracles::random_vector(n, 105), 3.5e-3);

  LanczosConfig lcfg;
  lcfg.k = r;
  lcfg.seed = 107;
  SketchedSvd sv = block_lanczos(scaled_design(p), lcfg);
  Preconditioner precond = build_sketched(sv, p.lambda);
  const double cond = conditioned_condition_number(scaled_design(p), p.lambda, precond);
  CHECK(cond <= static_cast<double>(d) + 2.0);

  // Convergence in a handful of epochs.
  auto pre = preconditioned_components(p, precond, ApplyMode::Dense);
  SvrgConfig cfg;
  cfg.epochs = 8;
  cfg.epoch_length = 2 * (n + d);
  cfg.step_size = 0.5 / mean_beta(*pre);
  cfg.seed = 109;
  ReferenceSolution ref = reference_minimum(p);
  Vector w0(d, 0.0);
  SvrgResult res = svrg_solve(*pre, cfg, w0, ref.minimum);
  CHECK(*res.trace.back().suboptimality <
        1e-6 * (objective(p, w0) - ref.minimum));
}

TEST_CASE("preconditioned run beats the plain run across seeds") {
  const std::size_t d = 60, n = 300;
  DenseMatrix u = orthonormalize(gaussian_matrix(d, d, 111));
  DenseMatrix v = orthonormalize(gaussian_matrix(n, d, 112));
  DenseMatrix scaled(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    const double qq = static_cast<double>(j + 1);
    Vector col(v.col(j).begin(), v.col(j).end());
    kernels::scal(1.0 / (qq * qq), col);
    scaled.set_col(j, col);
  }
  DenseMatrix x;
  kernels::dense_mul_mat(u, scaled.transposed(), x);
  RidgeProblem p(DataMatrix(std::move(x)), oracles::random_vector(n, 113), 1e-6);
  ReferenceSolution ref = reference_minimum(p);
  auto plain = ridge_components(p);
  const double eta_plain = 0.5 / mean_beta(*plain);
  const std::size_t m = 2 * (n + d);
  const double start_gap = objective(p, Vector(d, 0.0)) - ref.minimum;
  REQUIRE(start_gap > 0.0);

  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SvrgConfig cfg;
    cfg.epochs = 8;
    cfg.epoch_length = m;
    cfg.seed = seed;
    cfg.step_size = eta_plain;
    Vector w0(d, 0.0);
    SvrgResult base = svrg_solve(*plain, cfg, w0, ref.minimum);

    SketchedSolveResult sk;
    {
      LanczosConfig lcfg;
      lcfg.k = 15;
      lcfg.seed = seed;
      SketchedSvd sv = block_lanczos(scaled_design(p), lcfg);
      auto pre = preconditioned_components(p, build_sketched(sv, p.lambda), ApplyMode::Dense);
      cfg.step_size = 0.5 / mean_beta(*pre);
      sk = sketched_preconditioned_svrg(p, 15, cfg, seed, ApplyMode::Dense, ref.minimum);
    }
    const double plain_gap = *base.trace.back().suboptimality;
    const double sk_gap = objective(p, sk.iterate) - ref.minimum;
    if (sk_gap <= plain_gap) ++wins;
  }
  CHECK(wins >= 17);
}

}  // TEST_SUITE
