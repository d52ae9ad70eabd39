#include "skridge/random.hpp"

#include <cmath>
#include <numbers>

#include "skridge/errors.hpp"

namespace skridge {

double NormalSampler::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalSampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // in (0, 1], safe for log
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("gaussian_matrix: rows and cols must be at least 1");
  }
  DenseMatrix m(rows, cols);
  NormalSampler sampler(seed);
  fill_gaussian(m, sampler);
  return m;
}

void fill_gaussian(DenseMatrix& m, NormalSampler& sampler) {
  double* p = m.data();
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = sampler.normal();
}

}  // namespace skridge
