#include "lao/estimators.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

namespace lao {

std::vector<double> SparseSample::to_dense() const {
  std::vector<double> out(dim, 0.0);
  add_scaled_to(out, 1.0);
  return out;
}

void SparseSample::add_scaled_to(std::span<double> out, double factor) const {
  if (entries.empty()) return;
  const double weight = static_cast<double>(dim) / static_cast<double>(entries.size());
  for (const Entry& e : entries) out[e.index] += factor * (weight * e.value);
}

SparseSample sample_x(AttributeProbe probe, std::size_t k, RngStream& rng) {
  if (k == 0) throw UsageError("sample_x needs k >= 1");
  SparseSample sample;
  sample.dim = probe.dim();
  sample.entries.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = rng.uniform_index(sample.dim);
    sample.entries.push_back({i, probe.read(i)});
  }
  return sample;
}

GradientEstimate make_gradient(double phi, const SparseSample& sample) {
  GradientEstimate est;
  est.phi = phi;
  est.g.assign(sample.dim, 0.0);
  sample.add_scaled_to(est.g, phi);
  return est;
}

// --- importance sampling ---------------------------------------------------

ImportanceSampler::ImportanceSampler(std::span<const double> w, NormKind kind)
    : weights_(w), kind_(kind), cumulative_(w.size()) {
  if (w.empty()) throw UsageError("importance sampler needs d >= 1");
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    acc += kind == NormKind::L2 ? w[j] * w[j] : std::fabs(w[j]);
    cumulative_[j] = acc;
  }
  if (!(acc > 0.0)) throw NumericalError("degenerate sampling distribution");
}

double ImportanceSampler::probability(std::size_t j) const {
  const double wj = weights_[j];
  return (kind_ == NormKind::L2 ? wj * wj : std::fabs(wj)) / mass();
}

std::size_t ImportanceSampler::draw(RngStream& rng) const {
  const double u = rng.uniform01() * mass();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it != cumulative_.end()) return static_cast<std::size_t>(it - cumulative_.begin());
  // u rounded up to the total: take the last coordinate with positive weight.
  std::size_t j = weights_.size() - 1;
  while (weights_[j] == 0.0) --j;
  return j;
}

double ImportanceSampler::residual(std::size_t j, double x_j, double y) const {
  const double wj = weights_[j];
  if (kind_ == NormKind::L2) return mass() * x_j / wj - y;
  return mass() * (wj > 0.0 ? x_j : -x_j) - y;
}

double residual_l2(std::span<const double> w, AttributeProbe probe, double y, RngStream& rng) {
  const ImportanceSampler sampler(w, NormKind::L2);
  const std::size_t j = sampler.draw(rng);
  return sampler.residual(j, probe.read(j), y);
}

double residual_l1(std::span<const double> w, AttributeProbe probe, double y, RngStream& rng) {
  const ImportanceSampler sampler(w, NormKind::L1);
  const std::size_t j = sampler.draw(rng);
  return sampler.residual(j, probe.read(j), y);
}

double clip(double x, double c) { return std::max(std::min(x, c), -c); }

// --- analytic-gradient estimator -------------------------------------------

GenEstPlan GenEstPlan::for_bound(double b_eff) {
  if (!(b_eff > 0.0)) throw UsageError("gen_est bound must be > 0");
  const double n = std::ceil(4.0 * b_eff * b_eff);
  return {static_cast<std::size_t>(n), 2.0 * std::log2(n)};
}

namespace {

const double kLogMaxDouble = std::log(DBL_MAX);

// 2^{n+1}·a_n·Π θ_r assembled in sign / log-magnitude form.
class SignedLogProduct {
 public:
  SignedLogProduct(LogCoefficient coeff, std::size_t order)
      : sign_(coeff.sign),
        log_abs_(coeff.log_abs + static_cast<double>(order + 1) * std::numbers::ln2) {}

  void multiply(double factor) {
    if (factor == 0.0) {
      sign_ = 0;
      return;
    }
    if (factor < 0.0) sign_ = -sign_;
    log_abs_ += std::log(std::fabs(factor));
  }

  bool is_zero() const { return sign_ == 0; }

  double materialize() const {
    if (sign_ == 0) return 0.0;
    if (log_abs_ > kLogMaxDouble) throw NumericalError("estimator overflow");
    const double mag = std::exp(log_abs_);
    if (std::isinf(mag)) throw NumericalError("estimator overflow");
    return sign_ > 0 ? mag : -mag;
  }

 private:
  int sign_;
  double log_abs_;
};

}  // namespace

double gen_est(const AnalyticSeries& series, const ImportanceSampler& sampler, AttributeProbe probe,
               double y, const GenEstPlan& plan, RngStream& rng) {
  if (sampler.kind() != NormKind::L2) throw UsageError("gen_est uses the L2 importance sampler");
  const std::size_t n = rng.geometric_half();
  SignedLogProduct product(series.log_coeff(n), n);
  if (product.is_zero()) return 0.0;

  const bool single = static_cast<double>(n) <= plan.single_sample_threshold;
  for (std::size_t r = 0; r < n && !product.is_zero(); ++r) {
    double theta;
    if (single) {
      const std::size_t j = sampler.draw(rng);
      theta = sampler.residual(j, probe.read(j), y);
    } else {
      double acc = 0.0;
      for (std::size_t s = 0; s < plan.samples_per_factor; ++s) {
        const std::size_t j = sampler.draw(rng);
        acc += sampler.residual(j, probe.read(j), y);
      }
      theta = acc / static_cast<double>(plan.samples_per_factor);
    }
    product.multiply(theta);
  }
  return product.materialize();
}

double gen_est(const AnalyticSeries& series, std::span<const double> w, AttributeProbe probe,
               double y, double b_eff, RngStream& rng) {
  const ImportanceSampler sampler(w, NormKind::L2);
  return gen_est(series, sampler, probe, y, GenEstPlan::for_bound(b_eff), rng);
}

double gen_est_known_residual(const AnalyticSeries& series, double theta, RngStream& rng) {
  const std::size_t n = rng.geometric_half();
  SignedLogProduct product(series.log_coeff(n), n);
  for (std::size_t r = 0; r < n && !product.is_zero(); ++r) product.multiply(theta);
  return product.materialize();
}

}  // namespace lao
