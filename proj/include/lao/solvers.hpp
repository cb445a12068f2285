#pragma once

// Attribute-efficient learners and their full-information counterparts.
//
//   aerr   ridge (‖w‖₂ ≤ B), projected online gradient descent on estimated gradients
//   aelr   lasso (‖w‖₁ ≤ B), EG± multiplicative updates with clipped gradients
//   aesvr  smoothed δ-insensitive loss, aerr skeleton with gen_est residuals
//   ogd_ridge_full / eg_lasso_full  the same loops driven by exact gradients
//
// All learners make a single pass over the first m examples in order and
// return the averaged iterate w̄ = (1/m)·Σ_t w_t.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lao/core.hpp"
#include "lao/estimators.hpp"

namespace lao {

struct StepSize {
  bool automatic = true;
  double value = 0.0;

  static StepSize automatic_choice() { return {}; }
  static StepSize fixed(double eta) { return {false, eta}; }
};

struct SolverConfig {
  double B = 1.0;
  std::size_t k = 1;
  StepSize eta;
  std::size_t m = 0;  // 0: use the whole dataset
  LossSpec loss;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  std::size_t t = 0;
  std::uint64_t attributes = 0;
  double weight_norm = 0.0;         // ‖w_t‖ in the solver's norm
  double residual_estimate = 0.0;   // φ̃_t
  double max_exponent = 0.0;        // max_i |η·clip(g̃[i], 1/η)|, EG± only
};

struct RunRecord {
  std::vector<IterationRecord> iterations;
  std::uint64_t total_attributes = 0;
  std::size_t zero_weight_iterations = 0;
  double eta = 0.0;
  std::string kernel;
  double wall_seconds = 0.0;  // not part of the deterministic record

  /// Equality over everything except wall time.
  bool same_trajectory(const RunRecord& other) const;
};

struct SolverResult {
  Regressor regressor;  // w̄
  RunRecord record;
};

// Step sizes used when eta is "auto".
double eta_auto_aerr(std::size_t d, std::size_t k, std::size_t m);
double eta_auto_aelr(double B, std::size_t d, std::size_t k, std::size_t m);
/// Heuristic: the aerr rate scaled by ε to offset the 1/ε residual scale.
double eta_auto_aesvr(std::size_t d, std::size_t k, std::size_t m, double epsilon);

SolverResult aerr(const SolverConfig& config, std::span<const Example> data);
SolverResult aelr(const SolverConfig& config, std::span<const Example> data);
SolverResult aesvr(const SolverConfig& config, std::span<const Example> data);
SolverResult ogd_ridge_full(const SolverConfig& config, std::span<const Example> data);
SolverResult eg_lasso_full(const SolverConfig& config, std::span<const Example> data);

/// Produces the gradient used at one iteration. The ledger already has a
/// slot open for the current example.
using GradientOracle = std::function<GradientEstimate(
    std::span<const double> w, const Example& example, AttributeLedger& ledger, RngStream& rng)>;

/// Projected gradient loop shared by aerr, aesvr and ogd_ridge_full:
/// w₁ = (B, 0, …, 0), v = w − η·g, w ← v·B/max{‖v‖₂, B}.
SolverResult projected_gradient_descent(const SolverConfig& config, std::span<const Example> data,
                                        double eta, std::size_t ledger_budget,
                                        const GradientOracle& oracle);

/// EG± loop shared by aelr and eg_lasso_full: z⁺ = z⁻ = 1,
/// w = (z⁺ − z⁻)·B/(‖z⁺‖₁ + ‖z⁻‖₁), z^± ← z^±·exp(∓η·clip(g, 1/η)),
/// then (z⁺, z⁻) rescaled so the total mass is 2d.
SolverResult exponentiated_gradient(const SolverConfig& config, std::span<const Example> data,
                                    double eta, std::size_t ledger_budget,
                                    const GradientOracle& oracle);

/// Number of examples a solver will consume: config.m capped by data size.
std::size_t training_length(const SolverConfig& config, std::span<const Example> data);

}  // namespace lao
