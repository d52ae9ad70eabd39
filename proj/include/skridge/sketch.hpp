#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "skridge/data_matrix.hpp"
#include "skridge/dense_matrix.hpp"

namespace skridge {

/// Rank-k singular factors produced by the randomized block-Krylov sketch
/// or by the exact oracle (q == 0 marks exact factors).
///
/// Invariants: left factor column-orthonormal within 1e-8; singular values
/// non-increasing and non-negative. `rank_reduced` is set when the Krylov
/// basis collapsed below the requested rank and k was shrunk to match.
struct SketchedSvd {
  DenseMatrix left;        // d x k
  Vector singular_values;  // length k, descending
  DenseMatrix right;       // n x k
  std::size_t k = 0;
  std::size_t q = 0;  // block iterations used (0 for the exact oracle)
  bool rank_reduced = false;
};

struct LanczosConfig {
  std::size_t k = 0;         // target rank, 1 <= k <= min(d, n)
  double eps_prime = 0.5;    // accuracy parameter in (0, 1)
  std::uint64_t seed = 0;
  std::optional<std::size_t> q_override;  // explicit block-iteration count
};

/// Number of block iterations for an accuracy target:
/// max(2, ceil(log(n) / sqrt(eps_prime))).
std::size_t lanczos_iterations(std::size_t n, double eps_prime);

/// Orthonormal basis of the block Krylov space
/// span[A*Pi, (A A^T) A*Pi, ..., (A A^T)^{q-1} A*Pi].
/// Each block is re-orthogonalized against all previous blocks (twice), so
/// the returned basis spans the same space as the raw Krylov blocks in exact
/// arithmetic; numerically dependent directions are dropped. Stops early
/// when a block contributes nothing.
DenseMatrix krylov_block(const DataMatrix& a, const DenseMatrix& pi, std::size_t q);

/// Randomized block-Krylov rank-k SVD sketch.
///
/// Draws a Gaussian test matrix from cfg.seed, builds the Krylov basis Q,
/// and extracts the top-k factors of Q^T A through the (qk x qk) Gram
/// eigendecomposition, recovering right factors as A^T Q W / sigma.
/// With probability >= 9/10 over the seed the result satisfies
///   |sigma~_i^2 - sigma_i^2| <= eps' * sigma_{k+1}^2   for all i <= k,
///   ||A - A~_k|| <= (1 + eps') * sigma_{k+1},
/// which diagnostics verify against the exact oracle at test scale only.
SketchedSvd block_lanczos(const DataMatrix& a, const LanczosConfig& cfg);

/// Exact top-k SVD (dense decomposition; test-scale matrices only).
SketchedSvd exact_truncated_svd(const DataMatrix& a, std::size_t k);

}  // namespace skridge
