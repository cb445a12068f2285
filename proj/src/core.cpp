#include "lao/core.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "lao/kernels.hpp"
#include "lao/losses.hpp"

namespace lao {

const char* to_string(NormKind kind) { return kind == NormKind::L1 ? "L1" : "L2"; }

NormKind parse_norm_kind(const std::string& text) {
  if (text == "L1" || text == "l1") return NormKind::L1;
  if (text == "L2" || text == "l2") return NormKind::L2;
  throw UsageError("unknown norm kind '" + text + "'");
}

double Regressor::norm() const {
  return norm_kind == NormKind::L1 ? kernels::abs_sum(weights)
                                   : std::sqrt(kernels::sum_squares(weights));
}

bool Regressor::within_radius(double rel_tol) const { return norm() <= radius * (1.0 + rel_tol); }

double Regressor::predict(std::span<const double> x) const { return kernels::dot(weights, x); }

void LossSpec::validate(double radius) const {
  if (kind == LossKind::Squared) return;
  if (!(delta >= 0.0)) throw UsageError("loss delta must be >= 0");
  if (radius > 0.0 && delta > radius) throw UsageError("loss delta must not exceed B");
  if (kind == LossKind::SmoothedDeltaInsensitive && !(epsilon > 0.0)) {
    throw UsageError("smoothed loss needs epsilon > 0");
  }
}

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Squared:
      return "squared";
    case LossKind::DeltaInsensitive:
      return "delta-insensitive";
    case LossKind::SmoothedDeltaInsensitive:
      return "smoothed";
  }
  return "unknown";
}

LossKind parse_loss_kind(const std::string& text) {
  if (text == "squared") return LossKind::Squared;
  if (text == "delta-insensitive") return LossKind::DeltaInsensitive;
  if (text == "smoothed") return LossKind::SmoothedDeltaInsensitive;
  throw UsageError("unknown loss '" + text + "'");
}

double evaluate_loss(const LossSpec& spec, double yhat, double y) {
  const double r = yhat - y;
  switch (spec.kind) {
    case LossKind::Squared:
      return 0.5 * r * r;
    case LossKind::DeltaInsensitive:
      return delta_insensitive(r, spec.delta);
    case LossKind::SmoothedDeltaInsensitive:
      return f_eps(SmoothedLoss{spec.delta, spec.epsilon}, r);
  }
  return 0.0;
}

double empirical_risk(const LossSpec& spec, const Regressor& w, std::span<const Example> dataset) {
  if (dataset.empty()) throw DataError("empty evaluation set");
  double total = 0.0;
  for (const Example& ex : dataset) {
    if (ex.dim() != w.dim()) throw DataError("dimension mismatch between regressor and example");
    total += evaluate_loss(spec, w.predict(ex.attributes_unledgered()), ex.label());
  }
  return total / static_cast<double>(dataset.size());
}

// --- RngStream -------------------------------------------------------------

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return static_cast<std::size_t>(draw % bound);
}

std::size_t RngStream::geometric_half() {
  std::size_t n = 0;
  for (;;) {
    const std::uint64_t bits = engine_();
    const int ones = std::countr_one(bits);
    n += static_cast<std::size_t>(ones);
    if (ones < 64) return n;
  }
}

double RngStream::gaussian() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// --- AttributeLedger -------------------------------------------------------

AttributeLedger::AttributeLedger(std::size_t budget_k) : budget_k_(budget_k) {
  if (budget_k == 0) throw UsageError("attribute budget k must be >= 1");
}

void AttributeLedger::begin_example() { per_example_.push_back(0); }

void AttributeLedger::charge(std::uint64_t count) {
  if (per_example_.empty()) throw std::logic_error("attribute read outside an example slot");
  per_example_.back() += count;
  observed_total_ += count;
}

double AttributeLedger::observe(const Example& example, std::size_t index) {
  const auto x = example.attributes_unledgered();
  if (index >= x.size()) throw std::out_of_range("attribute index out of range");
  charge(1);
  return x[index];
}

std::span<const double> AttributeLedger::observe_all(const Example& example) {
  charge(example.dim());
  return example.attributes_unledgered();
}

}  // namespace lao
