#pragma once

// Dataset ingestion, normalization to the learners' norm assumptions,
// train/test splitting, k-fold cross-validation and synthetic problems.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lao/core.hpp"

namespace lao {

enum class NormCertificate { None, L2Unit, LinfUnit };

const char* to_string(NormCertificate c);

struct Dataset {
  std::vector<Example> examples;
  std::size_t dim = 0;
  NormCertificate certificate = NormCertificate::None;
  double label_bound = 0.0;  // realized max |y|
  // Original values are recovered as x·attribute_scale, y·label_scale.
  double attribute_scale = 1.0;
  double label_scale = 1.0;
  std::size_t labels_clamped = 0;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }
  std::span<const Example> view() const noexcept { return examples; }
};

enum class FileFormat { Csv, SparseIndexValue };

FileFormat parse_file_format(const std::string& text);

/// csv: d attribute fields then the label per line.
/// sparse: "label idx:val idx:val ..." with 1-based indices; the dimension is
/// `dim` when given, otherwise the largest index seen.
Dataset parse_dataset(std::istream& in, FileFormat format, std::optional<std::size_t> dim = {});
Dataset load(const std::filesystem::path& path, FileFormat format,
             std::optional<std::size_t> dim = {});
void write_dataset(std::ostream& out, const Dataset& ds, FileFormat format);

/// Divides every x by the dataset-wide max of the target norm when it exceeds
/// one, and every label by max(1, max|y|/B).
Dataset normalize(const Dataset& ds, NormCertificate target, double B);

/// Applies already-chosen scale factors (e.g. the training set's to a test set).
Dataset apply_scaling(const Dataset& ds, double attribute_scale, double label_scale);

/// Random partition; test gets round(test_fraction·n) examples, at least one
/// on each side.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed);

/// (train, validate) pairs over a shuffled order; validation folds are
/// disjoint and cover the dataset.
std::vector<std::pair<Dataset, Dataset>> kfold(const Dataset& ds, std::size_t folds,
                                               std::uint64_t seed);

/// Returns a copy with examples reordered by the given index sequence.
Dataset subset(const Dataset& ds, std::span<const std::size_t> indices);

/// Fisher-Yates permutation of 0..n-1 driven by the stream.
std::vector<std::size_t> shuffled_indices(std::size_t n, RngStream& rng);

struct SyntheticSpec {
  std::size_t d = 10;
  std::size_t sparsity = 0;  // nonzeros in w*; 0 means dense
  double sigma = 0.0;
  NormKind norm_kind = NormKind::L2;
  double B = 1.0;
  std::size_t count = 1000;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset dataset;
  Regressor true_w;
};

/// x uniform on the unit L2 ball (L2) or the cube [-1, 1]^d (L1 problems),
/// w* with the requested sparsity and ‖w*‖ = B, y = w*·x + σ·N(0,1) clamped
/// to [-B, B].
SyntheticData synth(const SyntheticSpec& spec);

void write_regressor(std::ostream& out, const Regressor& w);
Regressor read_regressor(std::istream& in);

}  // namespace lao
