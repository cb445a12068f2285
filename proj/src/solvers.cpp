#include "lao/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lao/kernels.hpp"
#include "lao/losses.hpp"

namespace lao {

bool RunRecord::same_trajectory(const RunRecord& other) const {
  if (total_attributes != other.total_attributes ||
      zero_weight_iterations != other.zero_weight_iterations || eta != other.eta ||
      iterations.size() != other.iterations.size()) {
    return false;
  }
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    const auto& a = iterations[i];
    const auto& b = other.iterations[i];
    if (a.t != b.t || a.attributes != b.attributes || a.weight_norm != b.weight_norm ||
        a.residual_estimate != b.residual_estimate || a.max_exponent != b.max_exponent) {
      return false;
    }
  }
  return true;
}

double eta_auto_aerr(std::size_t d, std::size_t k, std::size_t m) {
  return std::sqrt(static_cast<double>(k) / (2.0 * static_cast<double>(d) * static_cast<double>(m)));
}

double eta_auto_aelr(double B, std::size_t d, std::size_t k, std::size_t m) {
  const double dd = static_cast<double>(d);
  return (1.0 / (4.0 * B * B)) *
         std::sqrt(2.0 * static_cast<double>(k) * std::log(2.0 * dd) /
                   (5.0 * static_cast<double>(m) * dd));
}

double eta_auto_aesvr(std::size_t d, std::size_t k, std::size_t m, double epsilon) {
  return eta_auto_aerr(d, k, m) * epsilon;
}

std::size_t training_length(const SolverConfig& config, std::span<const Example> data) {
  return config.m == 0 ? data.size() : std::min(config.m, data.size());
}

namespace {

using Clock = std::chrono::steady_clock;

std::size_t check_data(const SolverConfig& config, std::span<const Example> data) {
  if (!(config.B > 0.0)) throw UsageError("B must be > 0");
  if (config.k == 0) throw UsageError("k must be >= 1");
  if (!config.eta.automatic && !(config.eta.value > 0.0)) throw UsageError("eta must be > 0");
  if (data.empty()) throw DataError("empty training set");
  const std::size_t d = data.front().dim();
  if (d == 0) throw DataError("examples have no attributes");
  const std::size_t m = training_length(config, data);
  for (std::size_t t = 0; t < m; ++t) {
    if (data[t].dim() != d) throw DataError("dimension mismatch in training data");
  }
  return d;
}

void require_loss(const SolverConfig& config, LossKind kind, const char* solver) {
  if (config.loss.kind != kind) {
    throw UsageError(std::string(solver) + " requires the " + to_string(kind) + " loss");
  }
}

bool is_zero(std::span<const double> w) {
  return std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; });
}

double l2_norm(std::span<const double> w) { return std::sqrt(kernels::sum_squares(w)); }

}  // namespace

SolverResult projected_gradient_descent(const SolverConfig& config, std::span<const Example> data,
                                        double eta, std::size_t ledger_budget,
                                        const GradientOracle& oracle) {
  const auto start = Clock::now();
  const std::size_t d = check_data(config, data);
  const std::size_t m = training_length(config, data);
  const double B = config.B;

  RngStream rng(config.seed);
  AttributeLedger ledger(ledger_budget);
  std::vector<double> w(d, 0.0);
  w[0] = B;
  std::vector<double> sum(d, 0.0);

  RunRecord record;
  record.eta = eta;
  record.kernel = kernels::to_string(kernels::active().isa);
  record.iterations.reserve(m);

  for (std::size_t t = 0; t < m; ++t) {
    ledger.begin_example();
    const bool zero = is_zero(w);
    GradientEstimate est = oracle(w, data[t], ledger, rng);
    if (zero) ++record.zero_weight_iterations;

    record.iterations.push_back(
        {t + 1, ledger.per_example_counts().back(), l2_norm(w), est.phi, 0.0});
    kernels::axpy(1.0, w, sum);

    kernels::axpy(-eta, est.g, w);
    const double norm = l2_norm(w);
    if (norm > B) kernels::scale(B / norm, w);
  }

  kernels::scale(1.0 / static_cast<double>(m), sum);
  record.total_attributes = ledger.observed_total();
  record.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return {Regressor{std::move(sum), NormKind::L2, B}, std::move(record)};
}

SolverResult exponentiated_gradient(const SolverConfig& config, std::span<const Example> data,
                                    double eta, std::size_t ledger_budget,
                                    const GradientOracle& oracle) {
  const auto start = Clock::now();
  const std::size_t d = check_data(config, data);
  const std::size_t m = training_length(config, data);
  const double B = config.B;
  const double clip_bound = 1.0 / eta;
  const double total_mass = 2.0 * static_cast<double>(d);

  RngStream rng(config.seed);
  AttributeLedger ledger(ledger_budget);
  std::vector<double> z_plus(d, 1.0);
  std::vector<double> z_minus(d, 1.0);
  std::vector<double> w(d, 0.0);
  std::vector<double> sum(d, 0.0);

  RunRecord record;
  record.eta = eta;
  record.kernel = kernels::to_string(kernels::active().isa);
  record.iterations.reserve(m);

  for (std::size_t t = 0; t < m; ++t) {
    const double mass = kernels::abs_sum(z_plus) + kernels::abs_sum(z_minus);
    kernels::scaled_difference(z_plus, z_minus, B / mass, w);

    ledger.begin_example();
    const bool zero = is_zero(w);
    GradientEstimate est = oracle(w, data[t], ledger, rng);
    if (zero) ++record.zero_weight_iterations;

    double max_exponent = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (est.g[i] == 0.0) continue;
      const double step = eta * clip(est.g[i], clip_bound);
      max_exponent = std::max(max_exponent, std::fabs(step));
      z_plus[i] *= std::exp(-step);
      z_minus[i] *= std::exp(step);
    }
    const double new_mass = kernels::abs_sum(z_plus) + kernels::abs_sum(z_minus);
    kernels::scale(total_mass / new_mass, z_plus);
    kernels::scale(total_mass / new_mass, z_minus);

    record.iterations.push_back(
        {t + 1, ledger.per_example_counts().back(), kernels::abs_sum(w), est.phi, max_exponent});
    kernels::axpy(1.0, w, sum);
  }

  kernels::scale(1.0 / static_cast<double>(m), sum);
  record.total_attributes = ledger.observed_total();
  record.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return {Regressor{std::move(sum), NormKind::L1, B}, std::move(record)};
}

// --- learners --------------------------------------------------------------

namespace {

GradientOracle lao_squared_oracle(std::size_t k, NormKind kind) {
  return [k, kind](std::span<const double> w, const Example& ex, AttributeLedger& ledger,
                   RngStream& rng) {
    AttributeProbe probe(ledger, ex);
    const SparseSample sample = sample_x(probe, k, rng);
    double phi;
    if (is_zero(w)) {
      // w·x = 0 without looking at x.
      phi = -ex.label();
    } else if (kind == NormKind::L2) {
      phi = residual_l2(w, probe, ex.label(), rng);
    } else {
      phi = residual_l1(w, probe, ex.label(), rng);
    }
    return make_gradient(phi, sample);
  };
}

GradientOracle full_information_oracle() {
  return [](std::span<const double> w, const Example& ex, AttributeLedger& ledger, RngStream&) {
    const auto x = ledger.observe_all(ex);
    GradientEstimate est;
    est.phi = kernels::dot(w, x) - ex.label();
    est.g.assign(x.size(), 0.0);
    kernels::axpy(est.phi, x, est.g);
    return est;
  };
}

double resolve(const StepSize& eta, double automatic) {
  return eta.automatic ? automatic : eta.value;
}

}  // namespace

SolverResult aerr(const SolverConfig& config, std::span<const Example> data) {
  require_loss(config, LossKind::Squared, "aerr");
  const std::size_t d = check_data(config, data);
  const std::size_t m = training_length(config, data);
  const double eta = resolve(config.eta, eta_auto_aerr(d, config.k, m));
  return projected_gradient_descent(config, data, eta, config.k,
                                    lao_squared_oracle(config.k, NormKind::L2));
}

SolverResult aelr(const SolverConfig& config, std::span<const Example> data) {
  require_loss(config, LossKind::Squared, "aelr");
  const std::size_t d = check_data(config, data);
  const std::size_t m = training_length(config, data);
  if (config.eta.automatic && static_cast<double>(m) < std::log(2.0 * static_cast<double>(d))) {
    throw UsageError("aelr with automatic eta needs m >= log(2d)");
  }
  const double eta = resolve(config.eta, eta_auto_aelr(config.B, d, config.k, m));
  return exponentiated_gradient(config, data, eta, config.k,
                                lao_squared_oracle(config.k, NormKind::L1));
}

SolverResult aesvr(const SolverConfig& config, std::span<const Example> data) {
  require_loss(config, LossKind::SmoothedDeltaInsensitive, "aesvr");
  config.loss.validate(config.B);
  const std::size_t d = check_data(config, data);
  const std::size_t m = training_length(config, data);
  const double epsilon = config.loss.epsilon;
  const double delta = config.loss.delta;
  const double eta = resolve(config.eta, eta_auto_aesvr(d, config.k, m, epsilon));
  // In x/ε coordinates ‖w‖₂ ≤ B and |y±| ≤ 2B/ε.
  const GenEstPlan plan = GenEstPlan::for_bound(2.0 * config.B / epsilon);
  const AnalyticSeries series = erf_series();
  const std::size_t k = config.k;

  GradientOracle oracle = [&, k](std::span<const double> w, const Example& ex,
                                 AttributeLedger& ledger, RngStream& rng) {
    AttributeProbe probe(ledger, ex);
    const SparseSample sample = sample_x(probe, k, rng);
    const double y_plus = (ex.label() + delta) / epsilon;
    const double y_minus = (ex.label() - delta) / epsilon;
    double phi;
    if (is_zero(w)) {
      phi = 0.5 * (gen_est_known_residual(series, -y_plus, rng) +
                   gen_est_known_residual(series, -y_minus, rng));
    } else {
      const ImportanceSampler sampler(w, NormKind::L2);
      const AttributeProbe scaled = probe.scaled(1.0 / epsilon);
      phi = 0.5 * (gen_est(series, sampler, scaled, y_plus, plan, rng) +
                   gen_est(series, sampler, scaled, y_minus, plan, rng));
    }
    return make_gradient(phi, sample);
  };
  return projected_gradient_descent(config, data, eta, k, oracle);
}

SolverResult ogd_ridge_full(const SolverConfig& config, std::span<const Example> data) {
  require_loss(config, LossKind::Squared, "ogd-full");
  const std::size_t d = check_data(config, data);
  const std::size_t m = training_length(config, data);
  const double eta = resolve(config.eta, eta_auto_aerr(d, d, m));
  return projected_gradient_descent(config, data, eta, d, full_information_oracle());
}

SolverResult eg_lasso_full(const SolverConfig& config, std::span<const Example> data) {
  require_loss(config, LossKind::Squared, "eg-full");
  const std::size_t d = check_data(config, data);
  const std::size_t m = training_length(config, data);
  const double eta = resolve(config.eta, eta_auto_aelr(config.B, d, d, m));
  return exponentiated_gradient(config, data, eta, d, full_information_oracle());
}

}  // namespace lao
