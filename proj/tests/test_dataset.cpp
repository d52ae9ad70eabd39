#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>

#include "skridge/dataset.hpp"
#include "skridge/errors.hpp"
#include "skridge/kernels.hpp"
#include "skridge/sketch.hpp"
#include "support/oracles.hpp"

using namespace skridge;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/skridge_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& text) const {
    std::ofstream out(path);
    out << text;
  }
};

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("synthetic columns are unit norm") {
  SyntheticSpec spec;
  spec.n = 40;
  spec.d = 12;
  spec.seed = 5;
  LabeledDataset ds = generate_synthetic(spec);
  REQUIRE(ds.data.rows() == 12);
  REQUIRE(ds.data.cols() == 40);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(std::abs(std::sqrt(ds.data.col_sq_norm(i)) - 1.0) < 1e-12);
  }
}

TEST_CASE("synthetic spectrum before normalization follows the decay") {
  SyntheticSpec spec;
  spec.n = 30;
  spec.d = 10;
  spec.seed = 7;
  spec.normalize_columns = false;
  for (SpectrumDecay decay : {SpectrumDecay::Linear, SpectrumDecay::Quadratic}) {
    spec.decay = decay;
    LabeledDataset ds = generate_synthetic(spec);
    SketchedSvd svd = exact_truncated_svd(ds.data, 10);
    for (std::size_t q = 0; q < 10; ++q) {
      const double qq = static_cast<double>(q + 1);
      const double want = decay == SpectrumDecay::Linear ? 1.0 / qq : 1.0 / (qq * qq);
      CHECK(std::abs(svd.singular_values[q] - want) < 1e-9);
    }
  }
}

TEST_CASE("noiseless labels with a pinned model are exact") {
  SyntheticSpec spec;
  spec.n = 25;
  spec.d = 8;
  spec.seed = 11;
  spec.noise_std = 0.0;
  Vector e1(8, 0.0);
  e1[0] = 1.0;
  spec.fixed_model = e1;
  LabeledDataset ds = generate_synthetic(spec);
  const DenseMatrix* x = ds.data.dense();
  REQUIRE(x != nullptr);
  for (std::size_t i = 0; i < 25; ++i) CHECK(ds.labels[i] == (*x)(0, i));
}

TEST_CASE("synthetic generation rejects d greater than n") {
  SyntheticSpec spec;
  spec.n = 5;
  spec.d = 6;
  CHECK_THROWS_AS(generate_synthetic(spec), ParameterError);
}

TEST_CASE("synthetic generation is bitwise reproducible per seed") {
  kernels::set_execution(kernels::Execution::Serial);
  SyntheticSpec spec;
  spec.n = 20;
  spec.d = 6;
  spec.seed = 13;
  LabeledDataset a = generate_synthetic(spec);
  LabeledDataset b = generate_synthetic(spec);
  kernels::set_execution(kernels::Execution::Auto);
  for (std::size_t i = 0; i < a.labels.size(); ++i) CHECK(a.labels[i] == b.labels[i]);
  const DenseMatrix* xa = a.data.dense();
  const DenseMatrix* xb = b.data.dense();
  for (std::size_t i = 0; i < xa->size(); ++i) CHECK(xa->data()[i] == xb->data()[i]);
}

TEST_CASE("corpus reader parses labels and features") {
  TempFile file("basic.txt");
  file.write("+1 3:0.5 7:1.2\n-1\n0.25 1:-2 2:4 # trailing comment\n");
  LabeledDataset ds = read_sparse_corpus(file.path);
  REQUIRE(ds.labels.size() == 3);
  CHECK(ds.labels[0] == 1.0);
  CHECK(ds.labels[1] == -1.0);
  CHECK(ds.labels[2] == 0.25);
  REQUIRE(ds.data.rows() == 7);  // max index seen
  const SparseMatrix* s = ds.data.sparse();
  REQUIRE(s != nullptr);
  CHECK(s->col_rows(0).size() == 2);
  CHECK(s->col_rows(0)[0] == 2);
  CHECK(s->col_values(0)[0] == 0.5);
  CHECK(s->col_rows(0)[1] == 6);
  CHECK(s->col_values(0)[1] == 1.2);
  CHECK(s->col_rows(1).empty());  // bare label line gives a zero column
  CHECK(s->col_rows(2).size() == 2);
}

TEST_CASE("corpus reader reports malformed lines with their number") {
  TempFile file("bad.txt");
  file.write("+1 1:0.5\n-1 nonsense\n");
  try {
    read_sparse_corpus(file.path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("corpus reader rejects non-increasing indices") {
  TempFile file("order.txt");
  file.write("+1 3:0.5 3:1.0\n");
  CHECK_THROWS_AS(read_sparse_corpus(file.path), ParseError);
  file.write("+1 5:0.5 2:1.0\n");
  CHECK_THROWS_AS(read_sparse_corpus(file.path), ParseError);
}

TEST_CASE("corpus round trip preserves the matrix") {
  SyntheticSpec spec;
  spec.n = 15;
  spec.d = 6;
  spec.seed = 17;
  LabeledDataset ds = generate_synthetic(spec);
  TempFile file("round.txt");
  write_sparse_corpus(ds, file.path);
  LabeledDataset back = read_sparse_corpus(file.path);
  REQUIRE(back.data.rows() == 6);
  REQUIRE(back.data.cols() == 15);
  DenseMatrix a = ds.data.densified();
  DenseMatrix b = back.data.densified();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a.data()[i] - b.data()[i]) <= 1e-15 * std::abs(a.data()[i]));
  }
  for (std::size_t i = 0; i < 15; ++i) CHECK(ds.labels[i] == back.labels[i]);
}

TEST_CASE("average-norm normalization divides by the mean norm") {
  SparseMatrix::Builder builder(2, 2);
  builder.add(0, 0, 1.0);  // norm 1
  builder.add(1, 1, 3.0);  // norm 3
  LabeledDataset ds;
  ds.data = DataMatrix(builder.build());
  ds.labels = {1.0, -1.0};
  LabeledDataset normed = average_norm_normalize(ds);
  CHECK(std::sqrt(normed.data.col_sq_norm(0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::sqrt(normed.data.col_sq_norm(1)) == doctest::Approx(1.5).epsilon(1e-15));
  // Mean column norm is now 1; renormalizing changes nothing.
  LabeledDataset again = average_norm_normalize(normed);
  CHECK(again.data.scale() == doctest::Approx(normed.data.scale()).epsilon(1e-15));
  // Sparsity pattern untouched (same shared storage).
  CHECK(normed.data.sparse() == ds.data.sparse());
}

TEST_CASE("average-norm normalization rejects an all-zero dataset") {
  LabeledDataset ds;
  ds.data = DataMatrix(DenseMatrix(3, 2));
  ds.labels = {0.0, 0.0};
  CHECK_THROWS_AS(average_norm_normalize(ds), DegenerateDataError);
}

TEST_CASE("normalization commutes with the linear map") {
  SyntheticSpec spec;
  spec.n = 18;
  spec.d = 7;
  spec.seed = 19;
  LabeledDataset ds = generate_synthetic(spec);
  LabeledDataset normed = average_norm_normalize(ds);
  const double factor = normed.data.scale() / ds.data.scale();
  Vector v = oracles::random_vector(18, 21);
  Vector a = normed.data.mul_vec(v);
  Vector b = ds.data.mul_vec(v);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == doctest::Approx(factor * b[i]).epsilon(1e-12));
  }
}

}  // TEST_SUITE
