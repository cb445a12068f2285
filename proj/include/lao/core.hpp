#pragma once

// Shared domain types for limited-attribute-observation (LAO) regression:
// examples, regressors, losses, the attribute ledger and seeded randomness.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lao {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind { Usage, Data, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// ---------------------------------------------------------------------------
// Example
// ---------------------------------------------------------------------------

/// One (attribute vector, label) pair. Learners never touch the attributes
/// directly; they go through an AttributeLedger. The unledgered view exists
/// for data preparation and full-information evaluation only.
class Example {
 public:
  Example() = default;
  Example(std::vector<double> x, double y) : x_(std::move(x)), y_(y) {}

  std::size_t dim() const noexcept { return x_.size(); }
  double label() const noexcept { return y_; }

  std::span<const double> attributes_unledgered() const noexcept { return x_; }

  bool operator==(const Example&) const = default;

 private:
  std::vector<double> x_;
  double y_ = 0.0;
};

// ---------------------------------------------------------------------------
// Regressor
// ---------------------------------------------------------------------------

enum class NormKind { L1, L2 };

const char* to_string(NormKind kind);
NormKind parse_norm_kind(const std::string& text);

inline constexpr double kNormTolerance = 1e-9;

struct Regressor {
  std::vector<double> weights;
  NormKind norm_kind = NormKind::L2;
  double radius = 1.0;

  std::size_t dim() const noexcept { return weights.size(); }
  double norm() const;
  /// ‖w‖ ≤ B·(1 + tol), the certificate every solver iterate must hold.
  bool within_radius(double rel_tol = kNormTolerance) const;
  double predict(std::span<const double> x) const;
};

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

enum class LossKind { Squared, DeltaInsensitive, SmoothedDeltaInsensitive };

struct LossSpec {
  LossKind kind = LossKind::Squared;
  double delta = 0.0;
  double epsilon = 0.0;

  static LossSpec squared() { return {}; }
  static LossSpec delta_insensitive(double delta) { return {LossKind::DeltaInsensitive, delta, 0.0}; }
  static LossSpec smoothed(double delta, double epsilon) {
    return {LossKind::SmoothedDeltaInsensitive, delta, epsilon};
  }

  /// Throws UsageError unless delta ≥ 0 (and ≤ radius when given) and
  /// epsilon > 0 for the smoothed kind.
  void validate(double radius = 0.0) const;
};

const char* to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& text);

double evaluate_loss(const LossSpec& spec, double yhat, double y);

/// Mean loss of w over the dataset. Full-information and unledgered.
double empirical_risk(const LossSpec& spec, const Regressor& w, std::span<const Example> dataset);

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

/// Seeded pseudorandom stream on top of std::mt19937_64. The engine is fully
/// specified by the standard; the derived draws below are implemented here so
/// sequences do not depend on the standard library's distribution classes.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on {0, ..., n-1}, unbiased by rejection. n ≥ 1.
  std::size_t uniform_index(std::size_t n);
  /// n ≥ 0 with Pr[n] = 2^-(n+1): the count of leading one-bits.
  std::size_t geometric_half();
  /// Standard normal via Box-Muller (one output per call).
  double gaussian();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Mixes (seed, tag) into an independent child seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// ---------------------------------------------------------------------------
// Attribute accounting
// ---------------------------------------------------------------------------

/// Counts every attribute value read during training. Each learner iteration
/// opens a new per-example slot with begin_example().
class AttributeLedger {
 public:
  explicit AttributeLedger(std::size_t budget_k);

  std::size_t budget_k() const noexcept { return budget_k_; }
  std::uint64_t observed_total() const noexcept { return observed_total_; }
  std::span<const std::uint64_t> per_example_counts() const noexcept { return per_example_; }
  std::size_t examples_opened() const noexcept { return per_example_.size(); }

  void begin_example();
  /// Reads x[index], charging one attribute to the current example.
  double observe(const Example& example, std::size_t index);
  /// Reads the whole vector, charging dim() attributes.
  std::span<const double> observe_all(const Example& example);

 private:
  void charge(std::uint64_t count);

  std::size_t budget_k_;
  std::uint64_t observed_total_ = 0;
  std::vector<std::uint64_t> per_example_;
};

/// Ledgered read access to one example, optionally through a fixed scale
/// (the AESVR estimator reads x/ε).
class AttributeProbe {
 public:
  AttributeProbe(AttributeLedger& ledger, const Example& example, double scale = 1.0)
      : ledger_(&ledger), example_(&example), scale_(scale) {}

  std::size_t dim() const noexcept { return example_->dim(); }
  double read(std::size_t index) { return scale_ * ledger_->observe(*example_, index); }
  AttributeProbe scaled(double factor) const { return {*ledger_, *example_, scale_ * factor}; }

 private:
  AttributeLedger* ledger_;
  const Example* example_;
  double scale_;
};

}  // namespace lao
