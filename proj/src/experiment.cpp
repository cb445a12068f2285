#include "lao/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

namespace lao {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Aerr:
      return "aerr";
    case Algorithm::Aelr:
      return "aelr";
    case Algorithm::Aesvr:
      return "aesvr";
    case Algorithm::OgdFull:
      return "ogd-full";
    case Algorithm::EgFull:
      return "eg-full";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& text) {
  for (Algorithm a : {Algorithm::Aerr, Algorithm::Aelr, Algorithm::Aesvr, Algorithm::OgdFull,
                      Algorithm::EgFull}) {
    if (text == to_string(a)) return a;
  }
  throw UsageError("unknown algorithm '" + text + "'");
}

bool is_attribute_efficient(Algorithm a) {
  return a == Algorithm::Aerr || a == Algorithm::Aelr || a == Algorithm::Aesvr;
}

NormCertificate required_certificate(Algorithm a) {
  return (a == Algorithm::Aelr || a == Algorithm::EgFull) ? NormCertificate::LinfUnit
                                                           : NormCertificate::L2Unit;
}

SolverResult run_algorithm(Algorithm a, const SolverConfig& config, std::span<const Example> data) {
  switch (a) {
    case Algorithm::Aerr:
      return aerr(config, data);
    case Algorithm::Aelr:
      return aelr(config, data);
    case Algorithm::Aesvr:
      return aesvr(config, data);
    case Algorithm::OgdFull:
      return ogd_ridge_full(config, data);
    case Algorithm::EgFull:
      return eg_lasso_full(config, data);
  }
  throw UsageError("unknown algorithm");
}

void ExperimentPlan::validate() const {
  if (seeds.empty()) throw UsageError("no seeds given");
  if (workers == 0) throw UsageError("workers must be >= 1");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0) throw UsageError("checkpoints must be >= 1");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw UsageError("checkpoints must be strictly increasing");
    }
  }
  if (!data.path && !data.synthetic) throw UsageError("no data source: give --data or --synth-d");
}

PreparedData prepare_data(const ExperimentPlan& plan, bool with_test) {
  Dataset raw;
  if (plan.data.synthetic) {
    raw = synth(*plan.data.synthetic).dataset;
  } else {
    raw = load(*plan.data.path, plan.data.format, plan.data.dim);
  }

  const NormCertificate target = required_certificate(plan.algorithm);
  PreparedData out;
  if (plan.data.test_path) {
    out.train = normalize(raw, target, plan.config.B);
    const Dataset test_raw = load(*plan.data.test_path, plan.data.format, raw.dim);
    out.test = apply_scaling(test_raw, out.train.attribute_scale, out.train.label_scale);
  } else if (with_test) {
    auto [train, test] = split(normalize(raw, target, plan.config.B), plan.data.test_fraction,
                               plan.data.split_seed);
    out.train = std::move(train);
    out.test = std::move(test);
  } else {
    out.train = normalize(raw, target, plan.config.B);
  }
  return out;
}

std::optional<std::string> clamp_budget(SolverConfig& config, std::size_t d) {
  if (config.k <= d) return std::nullopt;
  std::string msg = "warning: k=" + std::to_string(config.k) + " exceeds d=" + std::to_string(d) +
                    "; using k=" + std::to_string(d);
  config.k = d;
  return msg;
}

std::string format_real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

StepSize parse_step_size(const std::string& text) {
  if (text == "auto") return StepSize::automatic_choice();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw UsageError("eta must be 'auto' or a positive number, got '" + text + "'");
  }
  return StepSize::fixed(v);
}

std::string format_step_size(const StepSize& eta) {
  return eta.automatic ? "auto" : format_real(eta.value);
}

// --- train -----------------------------------------------------------------

TrainOutcome cmd_train(const ExperimentPlan& plan, const PreparedData& data) {
  SolverConfig config = plan.config;
  config.seed = plan.seeds.front();
  clamp_budget(config, data.train.dim);
  TrainOutcome out{run_algorithm(plan.algorithm, config, data.train.view()), std::nullopt};
  if (!data.test.empty()) {
    out.test_error = empirical_risk(LossSpec::squared(), out.result.regressor, data.test.view());
  }
  return out;
}

void write_run_summary(std::ostream& out, const ExperimentPlan& plan, const TrainOutcome& outcome,
                       const Dataset& train) {
  const RunRecord& rec = outcome.result.record;
  out << "algorithm=" << to_string(plan.algorithm) << '\n'
      << "seed=" << plan.seeds.front() << '\n'
      << "examples=" << rec.iterations.size() << '\n'
      << "d=" << train.dim << '\n'
      << "eta=" << format_real(rec.eta) << '\n'
      << "total_attributes=" << rec.total_attributes << '\n'
      << "zero_weight_iterations=" << rec.zero_weight_iterations << '\n'
      << "labels_clamped=" << train.labels_clamped << '\n'
      << "weight_norm=" << format_real(outcome.result.regressor.norm()) << '\n'
      << "kernel=" << rec.kernel << '\n';
  if (outcome.test_error) out << "test_squared_error=" << format_real(*outcome.test_error) << '\n';
  out << "wall_seconds=" << rec.wall_seconds << '\n';
}

// --- curve -----------------------------------------------------------------

std::vector<std::size_t> resolve_checkpoints(const ExperimentPlan& plan, std::size_t n) {
  if (!plan.checkpoints.empty()) {
    if (plan.checkpoints.back() > n) {
      throw UsageError("checkpoint " + std::to_string(plan.checkpoints.back()) +
                       " exceeds the training set size " + std::to_string(n));
    }
    return plan.checkpoints;
  }
  std::vector<std::size_t> out;
  constexpr std::size_t kDefaultPoints = 10;
  for (std::size_t i = 1; i <= kDefaultPoints; ++i) {
    const std::size_t c = i * n / kDefaultPoints;
    if (c > 0 && (out.empty() || c > out.back())) out.push_back(c);
  }
  return out;
}

namespace {

// Runs job(i) for i in [0, count) on up to `workers` threads. The first
// failure in index order is rethrown.
template <typename Job>
void run_pool(std::size_t count, std::size_t workers, Job job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(workers, count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<CurveRow> cmd_curve(const ExperimentPlan& plan, const PreparedData& data) {
  if (data.test.empty()) throw UsageError("curve needs a test set");
  const std::vector<std::size_t> checkpoints = resolve_checkpoints(plan, data.train.size());
  SolverConfig base = plan.config;
  clamp_budget(base, data.train.dim);

  std::vector<std::vector<CurveRow>> per_seed(plan.seeds.size());
  run_pool(plan.seeds.size(), plan.workers, [&](std::size_t s) {
    SolverConfig config = base;
    config.seed = plan.seeds[s];
    for (std::size_t c : checkpoints) {
      config.m = c;
      const SolverResult r = run_algorithm(plan.algorithm, config, data.train.view());
      per_seed[s].push_back({c, r.record.total_attributes,
                             empirical_risk(LossSpec::squared(), r.regressor, data.test.view()),
                             config.seed});
    }
  });

  std::vector<CurveRow> rows;
  for (auto& block : per_seed) rows.insert(rows.end(), block.begin(), block.end());
  return rows;
}

void write_curve(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "examples_seen,cumulative_attributes,test_squared_error,seed\n";
  for (const CurveRow& r : rows) {
    out << r.examples_seen << ',' << r.cumulative_attributes << ','
        << format_real(r.test_squared_error) << ',' << r.seed << '\n';
  }
}

// --- tune ------------------------------------------------------------------

namespace {

double resolved_eta(Algorithm a, const SolverConfig& config, std::size_t d, std::size_t m) {
  if (!config.eta.automatic) return config.eta.value;
  switch (a) {
    case Algorithm::Aerr:
      return eta_auto_aerr(d, config.k, m);
    case Algorithm::Aelr:
      return eta_auto_aelr(config.B, d, config.k, m);
    case Algorithm::Aesvr:
      return eta_auto_aesvr(d, config.k, m, config.loss.epsilon);
    case Algorithm::OgdFull:
      return eta_auto_aerr(d, d, m);
    case Algorithm::EgFull:
      return eta_auto_aelr(config.B, d, d, m);
  }
  return 0.0;
}

}  // namespace

TuneResult cmd_tune(const ExperimentPlan& plan, const PreparedData& data,
                    const std::vector<StepSize>& grid) {
  if (grid.empty()) throw UsageError("empty eta grid");
  SolverConfig base = plan.config;
  base.seed = plan.seeds.front();
  base.m = 0;
  clamp_budget(base, data.train.dim);
  const auto folds = kfold(data.train, plan.folds, derive_seed(plan.data.split_seed, 1));

  TuneResult result;
  result.entries.resize(grid.size());
  run_pool(grid.size(), plan.workers, [&](std::size_t g) {
    SolverConfig config = base;
    config.eta = grid[g];
    double total = 0.0;
    for (const auto& [train, validate] : folds) {
      const SolverResult r = run_algorithm(plan.algorithm, config, train.view());
      total += empirical_risk(LossSpec::squared(), r.regressor, validate.view());
    }
    result.entries[g] = {grid[g], resolved_eta(plan.algorithm, config, data.train.dim, data.train.size()),
                         total / static_cast<double>(folds.size())};
  });

  for (std::size_t g = 1; g < result.entries.size(); ++g) {
    const TuneEntry& cand = result.entries[g];
    const TuneEntry& best = result.entries[result.best];
    if (cand.validation_error < best.validation_error ||
        (cand.validation_error == best.validation_error && cand.resolved_eta < best.resolved_eta)) {
      result.best = g;
    }
  }
  return result;
}

void write_tune(std::ostream& out, const TuneResult& result) {
  out << "eta,resolved_eta,validation_squared_error\n";
  for (const TuneEntry& e : result.entries) {
    out << format_step_size(e.eta) << ',' << format_real(e.resolved_eta) << ','
        << format_real(e.validation_error) << '\n';
  }
}

}  // namespace lao
