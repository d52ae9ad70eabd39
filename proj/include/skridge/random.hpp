#pragma once

#include <cstdint>
#include <random>

#include "skridge/dense_matrix.hpp"

namespace skridge {

/// Deterministic standard-normal stream (Box-Muller over an explicit
/// 53-bit uniform mapping, so the draws do not depend on any library's
/// distribution internals).
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // in [0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// rows x cols matrix of i.i.d. standard-normal entries, filled in
/// column-major order. Identical output for identical seed.
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Column-major fill from an existing stream (lets one seed drive several
/// draws in a documented order).
void fill_gaussian(DenseMatrix& m, NormalSampler& sampler);

}  // namespace skridge
