#include "skridge/ridge.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "skridge/errors.hpp"
#include "skridge/kernels.hpp"

namespace skridge {

namespace {

// Zero data columns carry zero gradients; a tiny weight floor keeps the
// sampler's inverse probabilities finite without affecting the math.
void floor_betas(Vector& betas) {
  double top = 0.0;
  for (double b : betas) top = std::max(top, b);
  const double floor = top * 1e-12;
  for (double& b : betas) b = std::max(b, floor);
}

}  // namespace

RidgeProblem::RidgeProblem(DataMatrix d, Vector y, double lam)
    : data(std::move(d)), labels(std::move(y)), lambda(lam) {
  if (labels.size() != data.cols()) {
    throw DimensionError("ridge problem: label count must equal point count");
  }
  if (!(lambda > 0.0)) throw ParameterError("ridge problem: lambda must be positive");
}

double objective(const RidgeProblem& p, const Vector& w) {
  if (w.size() != p.dim()) throw DimensionError("objective: vector length mismatch");
  Vector r = p.data.tmul_vec(w);
  double loss = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double e = r[i] - p.labels[i];
    loss += e * e;
  }
  const double sq = kernels::dot(w, w);
  return loss / (2.0 * static_cast<double>(p.count())) + 0.5 * p.lambda * sq;
}

Vector objective_gradient(const RidgeProblem& p, const Vector& w) {
  Vector r = p.data.tmul_vec(w);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= p.labels[i];
  Vector g = p.data.mul_vec(r);
  const double inv_n = 1.0 / static_cast<double>(p.count());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = g[j] * inv_n + p.lambda * w[j];
  return g;
}

DataMatrix scaled_design(const RidgeProblem& p) {
  return p.data.scaled(1.0 / std::sqrt(static_cast<double>(p.count())));
}

RidgeFiniteSum::RidgeFiniteSum(RidgeProblem p)
    : problem_(std::move(p)), n_(problem_.count()), d_(problem_.dim()) {
  const double data_coef = static_cast<double>(n_ + d_) / static_cast<double>(n_);
  betas_.resize(n_ + d_);
  for (std::size_t i = 0; i < n_; ++i) betas_[i] = data_coef * problem_.data.col_sq_norm(i);
  for (std::size_t j = 0; j < d_; ++j) {
    betas_[n_ + j] = problem_.lambda * static_cast<double>(n_ + d_);
  }
  floor_betas(betas_);
}

double RidgeFiniteSum::objective(const Vector& w) const { return skridge::objective(problem_, w); }

void RidgeFiniteSum::full_gradient(const Vector& w, Vector& out) const {
  out = objective_gradient(problem_, w);
}

void RidgeFiniteSum::component_gradient(std::size_t i, const Vector& w, Vector& out) const {
  out.assign(d_, 0.0);
  if (i < n_) {
    const double data_coef = static_cast<double>(n_ + d_) / static_cast<double>(n_);
    const double g = data_coef * (problem_.data.col_dot(i, w) - problem_.labels[i]);
    problem_.data.col_axpy(i, g, out);
  } else if (i < n_ + d_) {
    const std::size_t j = i - n_;
    out[j] = problem_.lambda * static_cast<double>(n_ + d_) * w[j];
  } else {
    throw InputError("component_gradient: index out of range");
  }
}

std::shared_ptr<RidgeFiniteSum> ridge_components(const RidgeProblem& p) {
  return std::make_shared<RidgeFiniteSum>(p);
}

PreconditionedRidge::PreconditionedRidge(RidgeProblem p, Preconditioner precond, ApplyMode mode)
    : problem_(std::move(p)),
      precond_(std::move(precond)),
      n_(problem_.count()),
      d_(problem_.dim()),
      k_(precond_.rank()),
      max_drift_(std::make_shared<double>(0.0)) {
  if (precond_.dim() != d_) throw DimensionError("preconditioned components: dimension mismatch");
  data_coef_ = static_cast<double>(n_ + d_) / static_cast<double>(n_);
  reg_coef_ = problem_.lambda * static_cast<double>(n_ + d_);

  const std::size_t entries = n_ * d_;
  if (mode == ApplyMode::Auto) {
    mode_ = entries <= kDenseModeMaxEntries ? ApplyMode::Dense : ApplyMode::Lazy;
  } else {
    mode_ = mode;
  }
  if (mode_ == ApplyMode::Dense && entries > kDenseModeMaxEntries) {
    throw ScaleGuardError(
        "preconditioned components: dense mode would materialize too many entries; use lazy");
  }

  // Projections U^T x_i for every point (k x n), and the basis rows (k x d).
  if (k_ > 0) {
    proj_ = problem_.data.tmul_mat(precond_.basis()).transposed();
    basis_rows_ = precond_.basis().transposed();
  } else {
    proj_ = DenseMatrix(0, n_);
    basis_rows_ = DenseMatrix(0, d_);
  }

  betas_.resize(n_ + d_);
  for (std::size_t i = 0; i < n_; ++i) {
    betas_[i] = data_coef_ * precond_.inv_sqrt_sq_norm(problem_.data.col_sq_norm(i), proj_.col(i));
  }
  for (std::size_t j = 0; j < d_; ++j) {
    betas_[n_ + j] = reg_coef_ * precond_.inv_sqrt_sq_norm(1.0, basis_rows_.col(j));
  }
  floor_betas(betas_);

  if (mode_ == ApplyMode::Dense) {
    // Transformed points: c*X + U (diag - c) proj, all columns at once.
    transformed_ = problem_.data.densified();
    kernels::scal(precond_.tail_coeff(), {transformed_.data(), transformed_.size()});
    if (k_ > 0) {
      DenseMatrix scaled = proj_;
      for (std::size_t i = 0; i < n_; ++i) {
        auto col = scaled.col(i);
        for (std::size_t j = 0; j < k_; ++j) {
          col[j] *= precond_.inv_sqrt_diag()[j] - precond_.tail_coeff();
        }
      }
      DenseMatrix lift;
      kernels::dense_mul_mat(precond_.basis(), scaled, lift);
      kernels::axpy(1.0, {lift.data(), lift.size()}, {transformed_.data(), transformed_.size()});
    }
  }
}

double PreconditionedRidge::strong_convexity() const {
  if (alpha_override_) return *alpha_override_;
  // lambda * lambda_min(P^{-1}); a computable lower bound for the conditioned
  // curvature.
  return problem_.lambda * precond_.min_inv_eigenvalue();
}

void PreconditionedRidge::set_strong_convexity(double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("strong convexity override must be positive");
  alpha_override_ = alpha;
}

double PreconditionedRidge::point_inner(std::size_t i, const Vector& w,
                                        const Vector& basis_proj) const {
  double s = precond_.tail_coeff() * problem_.data.col_dot(i, w);
  auto proj_col = proj_.col(i);
  for (std::size_t j = 0; j < k_; ++j) {
    s += (precond_.inv_sqrt_diag()[j] - precond_.tail_coeff()) * proj_col[j] * basis_proj[j];
  }
  return s;
}

double PreconditionedRidge::objective(const Vector& w) const {
  if (w.size() != d_) throw DimensionError("objective: vector length mismatch");
  Vector residual(n_);
  if (mode_ == ApplyMode::Dense) {
    kernels::dense_tmul_vec(transformed_, w, residual);
  } else {
    Vector base = problem_.data.tmul_vec(w);  // X^T w
    Vector u(k_);
    kernels::dense_tmul_vec(precond_.basis(), w, u);
    for (std::size_t j = 0; j < k_; ++j) {
      u[j] *= precond_.inv_sqrt_diag()[j] - precond_.tail_coeff();
    }
    kernels::dense_tmul_vec(proj_, u, residual);  // proj^T ((diag - c) U^T w)
    kernels::axpy(precond_.tail_coeff(), base, residual);
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double e = residual[i] - problem_.labels[i];
    loss += e * e;
  }
  Vector uw(k_);
  kernels::dense_tmul_vec(precond_.basis(), w, uw);
  const double reg_sq = precond_.inv_sqrt_sq_norm(kernels::dot(w, w), uw);
  return loss / (2.0 * static_cast<double>(n_)) + 0.5 * problem_.lambda * reg_sq;
}

void PreconditionedRidge::full_gradient(const Vector& w, Vector& out) const {
  Vector residual(n_);
  out.assign(d_, 0.0);
  if (mode_ == ApplyMode::Dense) {
    kernels::dense_tmul_vec(transformed_, w, residual);
    for (std::size_t i = 0; i < n_; ++i) residual[i] -= problem_.labels[i];
    kernels::dense_mul_vec(transformed_, residual, out);
  } else {
    Vector base = problem_.data.tmul_vec(w);
    Vector u(k_);
    kernels::dense_tmul_vec(precond_.basis(), w, u);
    for (std::size_t j = 0; j < k_; ++j) {
      u[j] *= precond_.inv_sqrt_diag()[j] - precond_.tail_coeff();
    }
    kernels::dense_tmul_vec(proj_, u, residual);
    kernels::axpy(precond_.tail_coeff(), base, residual);
    for (std::size_t i = 0; i < n_; ++i) residual[i] -= problem_.labels[i];
    // X~ r = c (X r) + U (diag - c)(proj r)
    Vector xr = problem_.data.mul_vec(residual);
    Vector pr(k_);
    kernels::dense_mul_vec(proj_, residual, pr);
    for (std::size_t j = 0; j < k_; ++j) {
      pr[j] *= precond_.inv_sqrt_diag()[j] - precond_.tail_coeff();
    }
    Vector lift(d_);
    kernels::dense_mul_vec(precond_.basis(), pr, lift);
    for (std::size_t j = 0; j < d_; ++j) {
      out[j] = precond_.tail_coeff() * xr[j] + lift[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n_);
  kernels::scal(inv_n, out);
  // Regularizer part: lambda P^{-1} w.
  Vector half = precond_.apply_inv_sqrt(w);
  Vector full = precond_.apply_inv_sqrt(half);
  kernels::axpy(problem_.lambda, full, out);
}

void PreconditionedRidge::component_gradient(std::size_t i, const Vector& w, Vector& out) const {
  if (i >= n_ + d_) throw InputError("component_gradient: index out of range");
  out.assign(d_, 0.0);
  if (mode_ == ApplyMode::Dense && i < n_) {
    auto col = transformed_.col(i);
    const double g = data_coef_ * (kernels::dot(col, w) - problem_.labels[i]);
    kernels::axpy(g, col, out);
    return;
  }
  Vector uw(k_);
  kernels::dense_tmul_vec(precond_.basis(), w, uw);
  if (i < n_) {
    const double g = data_coef_ * (point_inner(i, w, uw) - problem_.labels[i]);
    // g * x~_i = g*c*x_i + U ((diag - c) proj_i * g)
    problem_.data.col_axpy(i, g * precond_.tail_coeff(), out);
    Vector coef(k_);
    auto proj_col = proj_.col(i);
    for (std::size_t j = 0; j < k_; ++j) {
      coef[j] = g * (precond_.inv_sqrt_diag()[j] - precond_.tail_coeff()) * proj_col[j];
    }
    Vector lift(d_);
    kernels::dense_mul_vec(precond_.basis(), coef, lift);
    kernels::axpy(1.0, lift, out);
  } else {
    const std::size_t j = i - n_;
    auto row = basis_rows_.col(j);
    double wb = precond_.tail_coeff() * w[j];
    for (std::size_t l = 0; l < k_; ++l) {
      wb += (precond_.inv_sqrt_diag()[l] - precond_.tail_coeff()) * row[l] * uw[l];
    }
    const double g = reg_coef_ * wb;
    out[j] += g * precond_.tail_coeff();
    Vector coef(k_);
    for (std::size_t l = 0; l < k_; ++l) {
      coef[l] = g * (precond_.inv_sqrt_diag()[l] - precond_.tail_coeff()) * row[l];
    }
    Vector lift(d_);
    kernels::dense_mul_vec(precond_.basis(), coef, lift);
    kernels::axpy(1.0, lift, out);
  }
}

/// Factored-iterate inner loop for lazy mode: w = base + U h, with z
/// tracking U^T w. Data steps touch the sparse point, the dense full
/// gradient, and k-vectors only; nothing of size d*k is formed per step.
class LazyEpochState final : public EpochState {
 public:
  explicit LazyEpochState(const PreconditionedRidge& p)
      : p_(p),
        k_(p.k_),
        base_(p.d_),
        h_(k_),
        z_(k_),
        sum_base_(p.d_),
        sum_h_(k_),
        snapshot_inner_(p.n_),
        snapshot_half_(p.d_),
        full_grad_(p.d_),
        basis_grad_(k_) {}

  void begin_epoch(const Vector& snapshot, const Vector& full_grad) override {
    const Preconditioner& pc = p_.precond_;
    base_ = snapshot;
    std::fill(h_.begin(), h_.end(), 0.0);
    std::fill(sum_base_.begin(), sum_base_.end(), 0.0);
    std::fill(sum_h_.begin(), sum_h_.end(), 0.0);
    steps_ = 0;
    full_grad_ = full_grad;
    // Fresh projections at the snapshot: z = U^T w exactly.
    kernels::dense_tmul_vec(pc.basis(), snapshot, z_);
    kernels::dense_tmul_vec(pc.basis(), full_grad, basis_grad_);
    // Snapshot inner products with every transformed point:
    // c * X^T w + proj^T ((diag - c) z).
    Vector u = z_;
    for (std::size_t j = 0; j < k_; ++j) {
      u[j] *= pc.inv_sqrt_diag()[j] - pc.tail_coeff();
    }
    Vector xw = p_.problem_.data.tmul_vec(snapshot);
    kernels::dense_tmul_vec(p_.proj_, u, snapshot_inner_);
    kernels::axpy(pc.tail_coeff(), xw, snapshot_inner_);
    // Snapshot regularizer scalars: (P^{-1/2} w)_j for every coordinate.
    pc.apply_inv_sqrt(snapshot, snapshot_half_);
  }

  void step(std::size_t index, double eta, double inv_nq) override {
    const Preconditioner& pc = p_.precond_;
    const double c = pc.tail_coeff();
    const Vector& diag = pc.inv_sqrt_diag();
    if (index < p_.n_) {
      auto proj_col = p_.proj_.col(index);
      double hs = 0.0, zm = 0.0;
      for (std::size_t j = 0; j < k_; ++j) {
        hs += h_[j] * proj_col[j];
        zm += z_[j] * (diag[j] - c) * proj_col[j];
      }
      const double inner = c * (p_.problem_.data.col_dot(index, base_) + hs) + zm;
      const double delta =
          p_.data_coef_ * (inner - snapshot_inner_[index]) * inv_nq;
      p_.problem_.data.col_axpy(index, -eta * delta * c, base_);
      for (std::size_t j = 0; j < k_; ++j) {
        h_[j] -= eta * delta * (diag[j] - c) * proj_col[j];
        z_[j] -= eta * (delta * diag[j] * proj_col[j] + basis_grad_[j]);
      }
    } else {
      const std::size_t coord = index - p_.n_;
      auto row = p_.basis_rows_.col(coord);
      double rh = 0.0, zm = 0.0;
      for (std::size_t j = 0; j < k_; ++j) {
        rh += h_[j] * row[j];
        zm += z_[j] * (diag[j] - c) * row[j];
      }
      const double wj = base_[coord] + rh;
      const double inner = c * wj + zm;
      const double delta = p_.reg_coef_ * (inner - snapshot_half_[coord]) * inv_nq;
      base_[coord] -= eta * delta * c;
      for (std::size_t j = 0; j < k_; ++j) {
        h_[j] -= eta * delta * (diag[j] - c) * row[j];
        z_[j] -= eta * (delta * diag[j] * row[j] + basis_grad_[j]);
      }
    }
    kernels::axpy(-eta, full_grad_, base_);
    kernels::axpy(1.0, base_, sum_base_);
    kernels::axpy(1.0, h_, sum_h_);
    ++steps_;
  }

  void epoch_average(Vector& out) override {
    const double inv_m = 1.0 / static_cast<double>(steps_);
    Vector ha = sum_h_;
    kernels::scal(inv_m, ha);
    Vector lift(p_.d_);
    kernels::dense_mul_vec(p_.precond_.basis(), ha, lift);
    out = sum_base_;
    kernels::scal(inv_m, out);
    kernels::axpy(1.0, lift, out);
    record_drift();
  }

 private:
  void record_drift() {
    // Compare the tracked projection with one recomputed from the current
    // factored iterate.
    Vector w = base_;
    Vector lift(p_.d_);
    kernels::dense_mul_vec(p_.precond_.basis(), h_, lift);
    kernels::axpy(1.0, lift, w);
    Vector exact(k_);
    kernels::dense_tmul_vec(p_.precond_.basis(), w, exact);
    double err = 0.0;
    for (std::size_t j = 0; j < k_; ++j) {
      const double e = z_[j] - exact[j];
      err += e * e;
    }
    const double scale = std::max(kernels::nrm2(w), 1e-30);
    *p_.max_drift_ = std::max(*p_.max_drift_, std::sqrt(err) / scale);
  }

  const PreconditionedRidge& p_;
  std::size_t k_;
  Vector base_, h_, z_, sum_base_, sum_h_;
  Vector snapshot_inner_, snapshot_half_, full_grad_, basis_grad_;
  std::size_t steps_ = 0;
};

std::unique_ptr<EpochState> PreconditionedRidge::make_epoch_state() const {
  if (mode_ == ApplyMode::Lazy) return std::make_unique<LazyEpochState>(*this);
  return FiniteSumProblem::make_epoch_state();
}

std::shared_ptr<PreconditionedRidge> preconditioned_components(const RidgeProblem& p,
                                                               const Preconditioner& precond,
                                                               ApplyMode mode) {
  return std::make_shared<PreconditionedRidge>(p, precond, mode);
}

SketchedSolveResult sketched_preconditioned_svrg(const RidgeProblem& p, std::size_t k,
                                                 const SvrgConfig& cfg, std::uint64_t sketch_seed,
                                                 ApplyMode mode,
                                                 std::optional<double> reference_value) {
  if (k < 1 || k > std::min(p.dim(), p.count())) {
    throw ParameterError("sketched svrg: k must satisfy 1 <= k <= min(d, n)");
  }
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  SketchedSolveResult out;
  auto t0 = clock::now();
  LanczosConfig lcfg;
  lcfg.k = k;
  lcfg.eps_prime = 0.5;
  lcfg.seed = sketch_seed;
  SketchedSvd sv = block_lanczos(scaled_design(p), lcfg);
  out.diagnostics.sketch_ms = ms_since(t0);
  out.diagnostics.singular_values = sv.singular_values;
  out.diagnostics.k_used = sv.k;
  out.diagnostics.q_used = sv.q;
  out.diagnostics.rank_reduced = sv.rank_reduced;

  t0 = clock::now();
  Preconditioner precond = build_sketched(sv, p.lambda);
  auto components = preconditioned_components(p, precond, mode);
  out.diagnostics.precompute_ms = ms_since(t0);
  out.diagnostics.mode = components->mode();
  out.diagnostics.beta_hat = mean_beta(*components);

  t0 = clock::now();
  Vector start(p.dim(), 0.0);
  SvrgResult solved = svrg_solve(*components, cfg, start, reference_value);
  out.diagnostics.solve_ms = ms_since(t0);
  out.diagnostics.max_projection_drift = components->max_projection_drift();

  out.iterate = precond.apply_inv_sqrt(solved.iterate);
  out.trace = std::move(solved.trace);
  return out;
}

}  // namespace skridge
