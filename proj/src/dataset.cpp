#include "skridge/dataset.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "skridge/errors.hpp"
#include "skridge/factorize.hpp"
#include "skridge/kernels.hpp"
#include "skridge/random.hpp"

namespace skridge {

LabeledDataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.d < 1 || spec.n < spec.d) {
    throw ParameterError("synthetic: requires n >= d >= 1");
  }
  if (spec.noise_std < 0.0) throw ParameterError("synthetic: noise_std must be >= 0");
  const std::size_t n = spec.n, d = spec.d;

  // One stream drives every draw, in a fixed order: left factors, right
  // factors, ground-truth model, label noise.
  NormalSampler sampler(spec.seed);
  DenseMatrix gu(d, d), gv(n, d);
  fill_gaussian(gu, sampler);
  fill_gaussian(gv, sampler);
  Vector model(d);
  for (double& v : model) v = sampler.normal();
  Vector noise(n);
  for (double& v : noise) v = spec.noise_std > 0.0 ? spec.noise_std * sampler.normal() : 0.0;
  if (spec.fixed_model) {
    if (spec.fixed_model->size() != d) throw DimensionError("synthetic: fixed model length");
    model = *spec.fixed_model;
  }

  DenseMatrix u = orthonormalize(gu);  // d x d
  DenseMatrix v = orthonormalize(gv);  // n x d
  if (u.cols() != d || v.cols() != d) {
    throw DegenerateDataError("synthetic: random factors lost rank");
  }

  // X = U diag(sigma) V^T with sigma_q = 1/q or 1/q^2.
  DenseMatrix scaled_v(n, d);
  for (std::size_t q = 0; q < d; ++q) {
    const double qq = static_cast<double>(q + 1);
    const double sigma = spec.decay == SpectrumDecay::Linear ? 1.0 / qq : 1.0 / (qq * qq);
    Vector col(v.col(q).begin(), v.col(q).end());
    kernels::scal(sigma, col);
    scaled_v.set_col(q, col);
  }
  DenseMatrix vt = scaled_v.transposed();  // d x n
  DenseMatrix x;
  kernels::dense_mul_mat(u, vt, x);

  if (spec.normalize_columns) {
    for (std::size_t i = 0; i < n; ++i) {
      auto col = x.col(i);
      const double nrm = kernels::nrm2(col);
      if (nrm == 0.0) throw DegenerateDataError("synthetic: zero column");
      kernels::scal(1.0 / nrm, col);
    }
  }

  LabeledDataset out;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.labels[i] = kernels::dot(x.col(i), model) + noise[i];
  }
  out.data = DataMatrix(std::move(x));
  std::ostringstream tag;
  tag << "synthetic(" << (spec.decay == SpectrumDecay::Linear ? "linear" : "quadratic")
      << ", n=" << n << ", d=" << d << ", seed=" << spec.seed << ")";
  out.provenance = tag.str();
  return out;
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

LabeledDataset read_sparse_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("corpus: cannot open " + path);

  struct Entry {
    std::size_t col, row;
    double value;
  };
  std::vector<Entry> entries;
  Vector labels;
  std::size_t max_index = 0;  // 1-based
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::istringstream line(strip_comment(raw));
    std::string tok;
    if (!(line >> tok)) continue;  // blank line
    double label;
    try {
      std::size_t used = 0;
      label = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad label '" + tok + "'");
    }
    const std::size_t col = labels.size();
    labels.push_back(label);
    std::size_t prev_index = 0;
    while (line >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 >= tok.size()) {
        throw ParseError(lineno, "bad feature '" + tok + "'");
      }
      std::size_t index;
      double value;
      try {
        std::size_t used = 0;
        const long long raw_idx = std::stoll(tok.substr(0, colon), &used);
        if (used != colon || raw_idx < 1) throw std::invalid_argument(tok);
        index = static_cast<std::size_t>(raw_idx);
        used = 0;
        const std::string vstr = tok.substr(colon + 1);
        value = std::stod(vstr, &used);
        if (used != vstr.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(lineno, "bad feature '" + tok + "'");
      }
      if (index <= prev_index) {
        throw ParseError(lineno, "feature indices must be strictly increasing");
      }
      if (!std::isfinite(value)) throw ParseError(lineno, "non-finite value");
      prev_index = index;
      max_index = std::max(max_index, index);
      if (value != 0.0) entries.push_back({col, index - 1, value});
    }
  }
  if (labels.empty()) throw InputError("corpus: no data lines in " + path);

  const std::size_t n = labels.size();
  const std::size_t d = max_index;
  if (d == 0) throw DegenerateDataError("corpus: no features seen");
  SparseMatrix::Builder builder(d, n);
  for (const Entry& e : entries) builder.add(e.row, e.col, e.value);
  LabeledDataset out;
  out.data = DataMatrix(builder.build());
  out.labels = std::move(labels);
  out.provenance = path;
  return out;
}

void write_sparse_corpus(const LabeledDataset& ds, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw InputError("corpus: cannot write " + path);
  char buf[64];
  const std::size_t n = ds.data.cols();
  const double scale = ds.data.scale();
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", ds.labels[i]);
    outf << buf;
    if (ds.data.is_sparse()) {
      auto rows = ds.data.sparse()->col_rows(i);
      auto vals = ds.data.sparse()->col_values(i);
      for (std::size_t p = 0; p < rows.size(); ++p) {
        std::snprintf(buf, sizeof(buf), "%.17g", scale * vals[p]);
        outf << ' ' << rows[p] + 1 << ':' << buf;
      }
    } else {
      auto col = ds.data.dense()->col(i);
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (col[r] == 0.0) continue;
        std::snprintf(buf, sizeof(buf), "%.17g", scale * col[r]);
        outf << ' ' << r + 1 << ':' << buf;
      }
    }
    outf << '\n';
  }
  if (!outf) throw InputError("corpus: write failed for " + path);
}

LabeledDataset average_norm_normalize(const LabeledDataset& ds) {
  const std::size_t n = ds.data.cols();
  if (n == 0) throw DegenerateDataError("normalize: empty dataset");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += std::sqrt(ds.data.col_sq_norm(i));
  const double mean = total / static_cast<double>(n);
  if (mean == 0.0) throw DegenerateDataError("normalize: all columns are zero");
  LabeledDataset out = ds;
  out.data = ds.data.scaled(1.0 / mean);
  return out;
}

}  // namespace skridge
