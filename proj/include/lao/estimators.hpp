#pragma once

// Gradient estimators for learning under limited attribute observation.
//
// The squared-loss gradient (w·x − y)·x is estimated as the product of two
// independent unbiased pieces: x̃ from k uniformly sampled attributes, and a
// residual estimate φ̃ from one attribute drawn by importance sampling on w.
// gen_est extends the residual estimate to f′(w·x − y) for analytic f′.

#include <cstddef>
#include <span>
#include <vector>

#include "lao/core.hpp"
#include "lao/losses.hpp"

namespace lao {

/// k uniformly drawn (index, value) attribute reads; duplicates allowed.
struct SparseSample {
  struct Entry {
    std::size_t index;
    double value;
  };

  std::vector<Entry> entries;
  std::size_t dim = 0;

  /// x̃ = (1/k)·Σ_r d·x[i_r]·e_{i_r}
  std::vector<double> to_dense() const;
  /// out += factor·x̃ without materializing x̃.
  void add_scaled_to(std::span<double> out, double factor) const;
};

struct GradientEstimate {
  std::vector<double> g;
  double phi = 0.0;
};

/// k independent uniform draws with replacement, each read through the probe.
SparseSample sample_x(AttributeProbe probe, std::size_t k, RngStream& rng);

/// g = phi·x̃
GradientEstimate make_gradient(double phi, const SparseSample& sample);

/// Draws a coordinate j with probability w[j]²/‖w‖₂² (L2) or |w[j]|/‖w‖₁
/// (L1) by inverse transform over the prefix sums of the current weights.
class ImportanceSampler {
 public:
  /// Throws NumericalError("degenerate sampling distribution") when w = 0.
  ImportanceSampler(std::span<const double> w, NormKind kind);

  std::size_t dim() const noexcept { return weights_.size(); }
  NormKind kind() const noexcept { return kind_; }
  /// ‖w‖₂² for L2, ‖w‖₁ for L1: the normalizer of the distribution.
  double mass() const noexcept { return cumulative_.back(); }
  double probability(std::size_t j) const;
  std::size_t draw(RngStream& rng) const;
  /// Single-draw unbiased estimate of w·x − y given the observed x[j].
  double residual(std::size_t j, double x_j, double y) const;

 private:
  std::span<const double> weights_;
  NormKind kind_;
  std::vector<double> cumulative_;
};

/// φ̃ = ‖w‖₂²·x[j]/w[j] − y, one attribute read. E[φ̃] = w·x − y.
double residual_l2(std::span<const double> w, AttributeProbe probe, double y, RngStream& rng);
/// φ̃ = ‖w‖₁·sign(w[j])·x[j] − y, one attribute read. E[φ̃] = w·x − y.
double residual_l1(std::span<const double> w, AttributeProbe probe, double y, RngStream& rng);

/// max{min{x, c}, −c}, c > 0.
double clip(double x, double c);

/// Procedure parameters for gen_est: N = ⌈4·b_eff²⌉ residual reads are
/// averaged per factor once the sampled order exceeds 2·log₂N.
struct GenEstPlan {
  std::size_t samples_per_factor;  // N
  double single_sample_threshold;  // 2·log₂N

  static GenEstPlan for_bound(double b_eff);
};

/// Unbiased estimate of f′(w·x − y) where series holds the Taylor
/// coefficients of f′. Draws the order n with Pr[n] = 2^-(n+1) and returns
/// 2^{n+1}·a_n·θ₁…θ_n with independent residual estimates θ_r. Reads no
/// attributes when a_n = 0, and stops reading once some θ_r = 0.
/// Throws NumericalError("estimator overflow") if the value exceeds double.
double gen_est(const AnalyticSeries& series, const ImportanceSampler& sampler, AttributeProbe probe,
               double y, const GenEstPlan& plan, RngStream& rng);

/// Convenience overload building the L2 sampler and plan.
double gen_est(const AnalyticSeries& series, std::span<const double> w, AttributeProbe probe,
               double y, double b_eff, RngStream& rng);

/// gen_est when the residual θ is known exactly (w = 0 gives θ = −y).
double gen_est_known_residual(const AnalyticSeries& series, double theta, RngStream& rng);

}  // namespace lao
