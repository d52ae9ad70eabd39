// Command-line harness: synthetic data generation, single solver runs, and
// the convergence / ratio benchmark experiments with CSV output.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skridge/bench.hpp"
#include "skridge/dataset.hpp"
#include "skridge/errors.hpp"
#include "skridge/kernels.hpp"
#include "skridge/ridge.hpp"
#include "skridge/sketch.hpp"
#include "skridge/svrg.hpp"

namespace {

using namespace skridge;

struct DatasetOptions {
  std::string data_path;
  std::string synthetic;  // "linear" or "quadratic"
  std::size_t n = 500;
  std::size_t d = 100;
  double noise = 0.1;
  std::uint64_t data_seed = 1;
  bool normalize = false;
};

void add_dataset_flags(CLI::App* cmd, DatasetOptions& opts) {
  auto* data = cmd->add_option("--data", opts.data_path, "sparse corpus file to load");
  auto* synth = cmd->add_option("--synthetic", opts.synthetic,
                                "synthetic instance with linear or quadratic decay")
                    ->check(CLI::IsMember({"linear", "quadratic"}));
  data->excludes(synth);
  cmd->add_option("--n", opts.n, "synthetic point count");
  cmd->add_option("--d", opts.d, "synthetic dimension");
  cmd->add_option("--noise", opts.noise, "synthetic label noise std");
  cmd->add_option("--data-seed", opts.data_seed, "synthetic generation seed");
  cmd->add_flag("--normalize", opts.normalize, "divide points by their average norm");
}

LabeledDataset load_dataset(const DatasetOptions& opts) {
  LabeledDataset ds;
  if (!opts.data_path.empty()) {
    ds = read_sparse_corpus(opts.data_path);
  } else if (!opts.synthetic.empty()) {
    SyntheticSpec spec;
    spec.n = opts.n;
    spec.d = opts.d;
    spec.decay = opts.synthetic == "linear" ? SpectrumDecay::Linear : SpectrumDecay::Quadratic;
    spec.noise_std = opts.noise;
    spec.seed = opts.data_seed;
    ds = generate_synthetic(spec);
  } else {
    throw ParameterError("either --data or --synthetic is required");
  }
  if (opts.normalize) ds = average_norm_normalize(ds);
  return ds;
}

ApplyMode parse_mode(const std::string& mode) {
  if (mode == "dense") return ApplyMode::Dense;
  if (mode == "lazy") return ApplyMode::Lazy;
  return ApplyMode::Auto;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    seeds.push_back(std::stoull(tok));
  }
  if (seeds.empty()) throw ParameterError("--seed: at least one seed required");
  return seeds;
}

template <typename Rows>
void emit_csv(const Rows& rows, const std::string& out_path) {
  if (out_path.empty()) {
    write_csv(rows, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write " + out_path);
    write_csv(rows, out);
  }
}

int run_gen(const DatasetOptions& data_opts, const std::string& out_path) {
  LabeledDataset ds = load_dataset(data_opts);
  write_sparse_corpus(ds, out_path);
  std::cout << "wrote " << ds.data.cols() << " points of dimension " << ds.data.rows() << " to "
            << out_path << "\n";
  return 0;
}

int run_solve(const DatasetOptions& data_opts, double lambda, std::size_t k, std::size_t epochs,
              std::optional<double> eta, bool tune, std::uint64_t seed, const std::string& mode) {
  LabeledDataset ds = load_dataset(data_opts);
  RidgeProblem problem(ds.data, ds.labels, lambda);
  const std::size_t m = 2 * (problem.count() + problem.dim());
  std::cout << "dataset: " << ds.provenance << " (n=" << problem.count()
            << ", d=" << problem.dim() << ")\n";

  SvrgConfig cfg;
  cfg.epochs = epochs;
  cfg.epoch_length = m;
  cfg.seed = seed;

  if (k == 0) {
    auto components = ridge_components(problem);
    const double beta_hat = mean_beta(*components);
    std::vector<double> grid = tune ? eta_grid(beta_hat)
                                    : std::vector<double>{eta.value_or(0.1 / beta_hat)};
    Vector w0(problem.dim(), 0.0);
    SvrgResult best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (double step : grid) {
      cfg.step_size = step;
      try {
        SvrgResult res = svrg_solve(*components, cfg, w0);
        if (res.trace.back().objective < best_obj) {
          best_obj = res.trace.back().objective;
          best = std::move(res);
          if (!tune) break;
        }
      } catch (const DivergenceError&) {
        if (!tune) throw;
      }
    }
    if (!std::isfinite(best_obj)) throw DivergenceError("every step size diverged", {});
    std::cout << "method: svrg (eta=" << format_double(cfg.step_size) << ", m=" << m << ")\n"
              << "final objective: " << format_double(best.trace.back().objective) << "\n"
              << "gradient norm: "
              << format_double(kernels::nrm2(objective_gradient(problem, best.iterate))) << "\n"
              << "solve time: " << format_double(best.trace.back().elapsed_ms) << " ms\n";
  } else {
    // The step-size scale needs the preconditioned smoothness, so build the
    // sketch once up front.
    LanczosConfig lcfg;
    lcfg.k = k;
    lcfg.seed = seed;
    SketchedSvd sv = block_lanczos(scaled_design(problem), lcfg);
    auto pre = preconditioned_components(problem, build_sketched(sv, lambda), parse_mode(mode));
    const double beta_hat = mean_beta(*pre);
    std::vector<double> grid = tune ? eta_grid(beta_hat)
                                    : std::vector<double>{eta.value_or(0.1 / beta_hat)};
    SketchedSolveResult best;
    double best_obj = std::numeric_limits<double>::infinity();
    double used_eta = grid.front();
    for (double step : grid) {
      cfg.step_size = step;
      try {
        SketchedSolveResult res =
            sketched_preconditioned_svrg(problem, k, cfg, seed, parse_mode(mode));
        if (res.trace.back().objective < best_obj) {
          best_obj = res.trace.back().objective;
          best = std::move(res);
          used_eta = step;
          if (!tune) break;
        }
      } catch (const DivergenceError&) {
        if (!tune) throw;
      }
    }
    if (!std::isfinite(best_obj)) throw DivergenceError("every step size diverged", {});
    const char* mode_name = best.diagnostics.mode == ApplyMode::Dense ? "dense" : "lazy";
    std::cout << "method: sketched-svrg (k=" << best.diagnostics.k_used << ", q="
              << best.diagnostics.q_used << ", mode=" << mode_name
              << ", eta=" << format_double(used_eta) << ", m=" << m << ")\n"
              << "final objective: " << format_double(best.trace.back().objective) << "\n"
              << "gradient norm: "
              << format_double(kernels::nrm2(objective_gradient(problem, best.iterate))) << "\n"
              << "sketch time: " << format_double(best.diagnostics.sketch_ms) << " ms\n"
              << "precompute time: " << format_double(best.diagnostics.precompute_ms) << " ms\n"
              << "solve time: " << format_double(best.diagnostics.solve_ms) << " ms\n";
  }
  return 0;
}

int run_bench_converge(const DatasetOptions& data_opts, const BenchConfig& cfg,
                       const std::string& out_path) {
  LabeledDataset ds = load_dataset(data_opts);
  RidgeProblem problem(ds.data, ds.labels, cfg.lambda);
  emit_csv(run_convergence(problem, cfg), out_path);
  return 0;
}

int run_bench_ratio(const DatasetOptions& data_opts, const std::string& eigs_path,
                    double lambda, std::size_t k_max, const std::string& out_path) {
  SpectrumSummary spec;
  if (!eigs_path.empty()) {
    std::ifstream in(eigs_path);
    if (!in) throw InputError("cannot open " + eigs_path);
    Vector eigs;
    double v;
    while (in >> v) eigs.push_back(v);
    if (eigs.empty()) throw InputError("eigenvalue file is empty");
    std::sort(eigs.begin(), eigs.end(), std::greater<>());
    spec = SpectrumSummary(std::move(eigs), lambda);
  } else {
    LabeledDataset ds = load_dataset(data_opts);
    if (ds.data.rows() * ds.data.cols() > 40'000'000) {
      throw ScaleGuardError(
          "ratio curve needs a dense decomposition at this size; supply --eigs instead");
    }
    RidgeProblem problem(ds.data, ds.labels, lambda);
    spec = dataset_spectrum(problem);
  }
  if (k_max > spec.dim()) k_max = spec.dim();
  emit_csv(run_ratio_curve(spec, k_max), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ridge solver with randomized low-rank preconditioning"};
  app.require_subcommand(1);

  DatasetOptions data_opts;
  std::string out_path;
  std::string mode = "auto";
  std::string seeds_text = "0";
  double lambda = 1e-6;
  std::size_t k = 0;
  std::size_t epochs = 20;
  std::optional<double> eta;
  bool tune = false;
  std::size_t k_max = 30;
  std::string eigs_path;

  auto* gen = app.add_subcommand("gen", "write a synthetic dataset as a sparse corpus file");
  add_dataset_flags(gen, data_opts);
  gen->add_option("--out", out_path, "output corpus path")->required();

  auto* solve = app.add_subcommand("solve", "one solver run; prints objective and timings");
  add_dataset_flags(solve, data_opts);
  solve->add_option("--lambda", lambda, "regularization strength");
  solve->add_option("--k", k, "preconditioner rank (0 runs plain svrg)");
  solve->add_option("--epochs", epochs, "epoch count");
  auto* eta_opt = solve->add_option("--eta", eta, "fixed step size");
  solve->add_flag("--tune", tune, "tune the step size on the default grid")->excludes(eta_opt);
  solve->add_option("--seed", seeds_text, "run seed");
  solve->add_option("--mode", mode, "component application mode")
      ->check(CLI::IsMember({"dense", "lazy", "auto"}));

  auto* bench = app.add_subcommand("bench", "benchmark experiments");
  bench->require_subcommand(1);
  auto* converge = bench->add_subcommand("converge", "per-epoch suboptimality CSV");
  add_dataset_flags(converge, data_opts);
  converge->add_option("--lambda", lambda, "regularization strength");
  converge->add_option("--k", k_max, "preconditioner rank")->capture_default_str();
  converge->add_option("--epochs", epochs, "epoch count");
  auto* ceta = converge->add_option("--eta", eta, "fixed step size (default: tune)");
  converge->add_flag("--tune", tune, "tune the step size (default)")->excludes(ceta);
  converge->add_option("--seed", seeds_text, "comma-separated seed list");
  converge->add_option("--mode", mode, "component application mode")
      ->check(CLI::IsMember({"dense", "lazy", "auto"}));
  converge->add_option("--out", out_path, "CSV output path (default stdout)");

  auto* ratio = bench->add_subcommand("ratio", "predicted speed-up ratio CSV");
  add_dataset_flags(ratio, data_opts);
  ratio->add_option("--eigs", eigs_path, "file of correlation eigenvalues, one per line");
  ratio->add_option("--lambda", lambda, "regularization strength");
  ratio->add_option("--k", k_max, "largest rank in the curve");
  ratio->add_option("--out", out_path, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return run_gen(data_opts, out_path);
    if (solve->parsed()) {
      const auto seeds = parse_seeds(seeds_text);
      return run_solve(data_opts, lambda, k, epochs, eta, tune, seeds.front(), mode);
    }
    if (converge->parsed()) {
      BenchConfig cfg;
      cfg.lambda = lambda;
      cfg.k = k_max;
      cfg.epochs = epochs;
      cfg.eta = eta;
      cfg.seeds = parse_seeds(seeds_text);
      cfg.mode = parse_mode(mode);
      return run_bench_converge(data_opts, cfg, out_path);
    }
    if (ratio->parsed()) return run_bench_ratio(data_opts, eigs_path, lambda, k_max, out_path);
  } catch (const ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
