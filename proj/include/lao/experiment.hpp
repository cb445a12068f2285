#pragma once

// Experiment harness behind the `lao` command-line tool: single training
// runs, learning curves over cumulative attributes, and cross-validated
// step-size selection.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lao/core.hpp"
#include "lao/data.hpp"
#include "lao/solvers.hpp"

namespace lao {

enum class Algorithm { Aerr, Aelr, Aesvr, OgdFull, EgFull };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& text);

/// True for the limited-observation learners.
bool is_attribute_efficient(Algorithm a);
/// Norm the algorithm's theory assumes on x.
NormCertificate required_certificate(Algorithm a);

SolverResult run_algorithm(Algorithm a, const SolverConfig& config, std::span<const Example> data);

struct DataSource {
  std::optional<std::filesystem::path> path;
  FileFormat format = FileFormat::Csv;
  std::optional<std::size_t> dim;
  std::optional<std::filesystem::path> test_path;
  std::optional<SyntheticSpec> synthetic;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;
};

struct ExperimentPlan {
  Algorithm algorithm = Algorithm::Aerr;
  DataSource data;
  SolverConfig config;  // config.seed is replaced by each entry of `seeds`
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::size_t> checkpoints;  // empty: ten evenly spaced prefixes
  std::size_t workers = 1;
  std::size_t folds = 10;

  /// Throws UsageError on an empty seed list, a zero worker count or
  /// non-increasing checkpoints.
  void validate() const;
};

struct PreparedData {
  Dataset train;
  Dataset test;  // empty when no test split was requested
};

/// Loads or generates the data, normalizes it for the plan's algorithm and
/// radius, and splits off a test set when `with_test` is set.
PreparedData prepare_data(const ExperimentPlan& plan, bool with_test);

/// k > d is clamped to d; returns the warning text when that happens.
std::optional<std::string> clamp_budget(SolverConfig& config, std::size_t d);

// --- train ---------------------------------------------------------------

struct TrainOutcome {
  SolverResult result;
  std::optional<double> test_error;  // squared loss on the test split
};

TrainOutcome cmd_train(const ExperimentPlan& plan, const PreparedData& data);
void write_run_summary(std::ostream& out, const ExperimentPlan& plan, const TrainOutcome& outcome,
                       const Dataset& train);

// --- curve ---------------------------------------------------------------

struct CurveRow {
  std::size_t examples_seen = 0;
  std::uint64_t cumulative_attributes = 0;
  double test_squared_error = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const CurveRow&) const = default;
};

/// Checkpoints resolved against a training set of size n.
std::vector<std::size_t> resolve_checkpoints(const ExperimentPlan& plan, std::size_t n);

/// For every seed and checkpoint c, trains on the first c examples and
/// evaluates w̄ on the test set (unledgered). Seeds run on a worker pool;
/// rows come back ordered by (seed position, checkpoint).
std::vector<CurveRow> cmd_curve(const ExperimentPlan& plan, const PreparedData& data);
void write_curve(std::ostream& out, const std::vector<CurveRow>& rows);

// --- tune ----------------------------------------------------------------

struct TuneEntry {
  StepSize eta;
  double resolved_eta = 0.0;  // for the full training length
  double validation_error = 0.0;
};

struct TuneResult {
  std::vector<TuneEntry> entries;
  std::size_t best = 0;
};

/// Mean validation squared error of each grid step size over `plan.folds`
/// folds; the minimizer wins, ties go to the smaller step.
TuneResult cmd_tune(const ExperimentPlan& plan, const PreparedData& data,
                    const std::vector<StepSize>& grid);
void write_tune(std::ostream& out, const TuneResult& result);

StepSize parse_step_size(const std::string& text);
std::string format_step_size(const StepSize& eta);

/// Shortest round-trip decimal form.
std::string format_real(double v);

}  // namespace lao
