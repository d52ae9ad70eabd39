#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "skridge/data_matrix.hpp"

namespace skridge {

enum class SpectrumDecay { Linear, Quadratic };  // sigma_q = 1/q or 1/q^2

/// Recipe for a synthetic regression instance: a d x n matrix with
/// prescribed singular-value decay and uniformly random singular vectors,
/// unit-normalized columns, and labels from a Gaussian ground-truth model
/// plus noise. Requires n >= d (the construction orients the matrix that
/// way; transpose outside if needed).
struct SyntheticSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  SpectrumDecay decay = SpectrumDecay::Linear;
  double noise_std = 0.1;
  std::uint64_t seed = 0;
  bool normalize_columns = true;       // spectrum tests read the raw matrix
  std::optional<Vector> fixed_model;   // use this ground truth instead of a draw
};

struct LabeledDataset {
  DataMatrix data;  // d x n
  Vector labels;    // length n
  std::string provenance;
};

/// Deterministic synthetic instance (pure function of `spec`).
LabeledDataset generate_synthetic(const SyntheticSpec& spec);

/// Read a sparse corpus in the usual text form, one point per line:
///   label idx:val idx:val ...
/// with 1-based strictly increasing indices; '#' starts a comment that runs
/// to the end of the line. The feature dimension is the largest index seen.
LabeledDataset read_sparse_corpus(const std::string& path);

/// Write a dataset in the same text format with round-trip precision.
void write_sparse_corpus(const LabeledDataset& ds, const std::string& path);

/// Divide every column by the single scalar mean column norm, so the mean
/// norm becomes 1. Pure rescale: sparsity pattern and labels untouched.
LabeledDataset average_norm_normalize(const LabeledDataset& ds);

}  // namespace skridge
