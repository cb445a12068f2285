// lao: train, evaluate and benchmark attribute-efficient regressors.
//
//   lao train  --algorithm aerr --data train.csv --k 4 --out model.txt
//   lao curve  --algorithm aelr --synth-d 100 --synth-count 20000 --seed 1,2,3
//   lao tune   --algorithm aerr --data train.csv --grid auto,0.01,0.1
//   lao synth  --synth-d 20 --synth-count 5000 --out data.csv
//
// Any long option may also come from a key=value file given by --config;
// options on the command line take precedence. Exit codes: 0 success,
// 1 usage, 2 data error, 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lao/data.hpp"
#include "lao/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumerical = 3 };

struct Options {
  std::string algorithm = "aerr";
  double B = 1.0;
  std::size_t k = 1;
  std::string eta = "auto";
  std::size_t m = 0;
  std::string loss;
  double delta = 0.0;
  double epsilon = 0.5;
  std::vector<std::uint64_t> seeds{0};

  std::string data;
  std::string format = "csv";
  std::size_t dim = 0;
  std::string test_data;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;

  std::size_t synth_d = 0;
  std::size_t synth_sparsity = 0;
  double synth_sigma = 0.1;
  std::string synth_norm;
  std::size_t synth_count = 1000;
  std::uint64_t synth_seed = 0;

  std::vector<std::size_t> checkpoints;
  std::string out;
  std::size_t workers = 1;
  std::size_t folds = 10;
  std::vector<std::string> grid{"auto"};
  std::string true_w;
  std::string config;
};

void add_shared_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "key=value file supplying defaults for long options");
  sub->add_option("--algorithm", o.algorithm, "aerr | aelr | aesvr | ogd-full | eg-full")
      ->capture_default_str();
  sub->add_option("--B", o.B, "norm-ball radius B")->capture_default_str();
  sub->add_option("--k", o.k, "attributes observed per example")->capture_default_str();
  sub->add_option("--eta", o.eta, "step size or 'auto'")->capture_default_str();
  sub->add_option("--m", o.m, "training length (0: whole training set)")->capture_default_str();
  sub->add_option("--loss", o.loss, "squared | delta-insensitive | smoothed (default by algorithm)");
  sub->add_option("--delta", o.delta, "insensitivity width")->capture_default_str();
  sub->add_option("--epsilon", o.epsilon, "smoothing accuracy")->capture_default_str();
  sub->add_option("--seed", o.seeds, "seed list (comma separated)")
      ->delimiter(',')
      ->envname("LAO_SEED")
      ->capture_default_str();

  sub->add_option("--data", o.data, "training data file");
  sub->add_option("--format", o.format, "csv | sparse")->capture_default_str();
  sub->add_option("--dim", o.dim, "attribute count for sparse files (0: infer)");
  sub->add_option("--test-data", o.test_data, "explicit test file");
  sub->add_option("--test-fraction", o.test_fraction, "held-out fraction when no test file")
      ->capture_default_str();
  sub->add_option("--split-seed", o.split_seed, "seed for splitting and folds")->capture_default_str();

  sub->add_option("--synth-d", o.synth_d, "generate a synthetic problem of this dimension");
  sub->add_option("--synth-sparsity", o.synth_sparsity, "nonzeros in w* (0: dense)");
  sub->add_option("--synth-sigma", o.synth_sigma, "label noise")->capture_default_str();
  sub->add_option("--synth-norm", o.synth_norm, "L2 | L1 (default by algorithm)");
  sub->add_option("--synth-count", o.synth_count, "number of examples")->capture_default_str();
  sub->add_option("--synth-seed", o.synth_seed, "generator seed")->capture_default_str();

  sub->add_option("--checkpoints", o.checkpoints, "increasing example counts")->delimiter(',');
  sub->add_option("--out", o.out, "output file (default: stdout)");
  sub->add_option("--workers", o.workers, "parallel seed cells")->capture_default_str();
  sub->add_option("--folds", o.folds, "cross-validation folds")->capture_default_str();
}

struct Cli {
  std::unique_ptr<CLI::App> app;
  Options options;
  std::vector<CLI::App*> subs;
};

std::unique_ptr<Cli> build_cli() {
  auto cli = std::make_unique<Cli>();
  cli->app = std::make_unique<CLI::App>("Attribute-efficient linear regression", "lao");
  cli->app->require_subcommand(1);
  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = cli->app->add_subcommand(name, help);
    add_shared_options(sub, cli->options);
    cli->subs.push_back(sub);
    return sub;
  };
  add("train", "train one regressor and write it to --out");
  add("curve", "learning curve: test error against cumulative attributes");
  CLI::App* tune = add("tune", "select eta by k-fold cross-validation");
  tune->add_option("--grid", cli->options.grid, "eta candidates (comma separated, 'auto' allowed)")
      ->delimiter(',');
  CLI::App* synth = add("synth", "write a synthetic dataset");
  synth->add_option("--true-w", cli->options.true_w, "also write the generating regressor here");
  return cli;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lao::UsageError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw lao::UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = strip(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    out[key] = strip(line.substr(eq + 1));
  }
  return out;
}

struct ExitRequest {
  int code;
};

void parse_or_exit(CLI::App& app, int argc, const char* const* argv) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    throw ExitRequest{code == 0 ? kOk : kUsage};
  }
}

// Reparses with config-file values inserted for options the command line
// left unset. Expects the subcommand as the first argument.
std::unique_ptr<Cli> parse_with_config(int argc, char** argv) {
  auto first = build_cli();
  parse_or_exit(*first->app, argc, argv);

  CLI::App* sub = first->app->get_subcommands().front();
  if (first->options.config.empty()) return first;

  std::vector<std::string> args{argv[0], sub->get_name()};
  for (const auto& [key, value] : read_config(first->options.config)) {
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw lao::UsageError("unknown config key '" + key + "'");
    }
    if (opt->count() == 0) {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  for (int i = 2; i < argc; ++i) args.emplace_back(argv[i]);

  auto second = build_cli();
  std::vector<const char*> cargv;
  for (const auto& a : args) cargv.push_back(a.c_str());
  parse_or_exit(*second->app, static_cast<int>(cargv.size()), cargv.data());
  return second;
}

lao::ExperimentPlan make_plan(const Options& o) {
  lao::ExperimentPlan plan;
  plan.algorithm = lao::parse_algorithm(o.algorithm);

  lao::SolverConfig& c = plan.config;
  c.B = o.B;
  c.k = o.k;
  c.eta = lao::parse_step_size(o.eta);
  c.m = o.m;
  const std::string loss =
      !o.loss.empty() ? o.loss : (plan.algorithm == lao::Algorithm::Aesvr ? "smoothed" : "squared");
  c.loss.kind = lao::parse_loss_kind(loss);
  c.loss.delta = o.delta;
  c.loss.epsilon = o.epsilon;
  c.loss.validate(c.B);
  plan.seeds = o.seeds;

  lao::DataSource& d = plan.data;
  d.format = lao::parse_file_format(o.format);
  if (!o.data.empty()) d.path = o.data;
  if (o.dim > 0) d.dim = o.dim;
  if (!o.test_data.empty()) d.test_path = o.test_data;
  d.test_fraction = o.test_fraction;
  d.split_seed = o.split_seed;
  if (o.synth_d > 0) {
    if (d.path) throw lao::UsageError("give either --data or --synth-d, not both");
    lao::SyntheticSpec s;
    s.d = o.synth_d;
    s.sparsity = o.synth_sparsity;
    s.sigma = o.synth_sigma;
    s.norm_kind = !o.synth_norm.empty() ? lao::parse_norm_kind(o.synth_norm)
                  : lao::required_certificate(plan.algorithm) == lao::NormCertificate::LinfUnit
                      ? lao::NormKind::L1
                      : lao::NormKind::L2;
    s.B = o.B;
    s.count = o.synth_count;
    s.seed = o.synth_seed;
    d.synthetic = s;
  }

  plan.checkpoints = o.checkpoints;
  plan.workers = o.workers;
  plan.folds = o.folds;
  return plan;
}

// Writes to --out, or stdout when it is empty.
template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lao::DataError("cannot open output file '" + path + "'");
  write(out);
  if (!out) throw lao::DataError("failed writing '" + path + "'");
}

void warn_budget(const lao::ExperimentPlan& plan, const lao::PreparedData& data) {
  lao::SolverConfig probe = plan.config;
  if (auto msg = lao::clamp_budget(probe, data.train.dim)) std::cerr << *msg << '\n';
}

int run_train(const Options& o) {
  const lao::ExperimentPlan plan = make_plan(o);
  plan.validate();
  const lao::PreparedData data = lao::prepare_data(plan, !o.test_data.empty());
  warn_budget(plan, data);
  const lao::TrainOutcome outcome = lao::cmd_train(plan, data);
  if (o.out.empty()) throw lao::UsageError("train needs --out for the regressor file");
  emit(o.out, [&](std::ostream& out) { lao::write_regressor(out, outcome.result.regressor); });
  lao::write_run_summary(std::cout, plan, outcome, data.train);
  return kOk;
}

int run_curve(const Options& o) {
  const lao::ExperimentPlan plan = make_plan(o);
  plan.validate();
  const lao::PreparedData data = lao::prepare_data(plan, true);
  warn_budget(plan, data);
  const auto rows = lao::cmd_curve(plan, data);
  emit(o.out, [&](std::ostream& out) { lao::write_curve(out, rows); });
  return kOk;
}

int run_tune(const Options& o) {
  const lao::ExperimentPlan plan = make_plan(o);
  plan.validate();
  const lao::PreparedData data = lao::prepare_data(plan, false);
  warn_budget(plan, data);
  std::vector<lao::StepSize> grid;
  for (const auto& g : o.grid) grid.push_back(lao::parse_step_size(g));
  const lao::TuneResult result = lao::cmd_tune(plan, data, grid);
  emit(o.out, [&](std::ostream& out) { lao::write_tune(out, result); });
  const auto& best = result.entries[result.best];
  std::cout << "best_eta=" << lao::format_step_size(best.eta)
            << " resolved=" << lao::format_real(best.resolved_eta) << '\n';
  return kOk;
}

int run_synth(const Options& o) {
  if (o.synth_d == 0) throw lao::UsageError("synth needs --synth-d");
  lao::SyntheticSpec s;
  s.d = o.synth_d;
  s.sparsity = o.synth_sparsity;
  s.sigma = o.synth_sigma;
  s.norm_kind = o.synth_norm.empty() ? lao::NormKind::L2 : lao::parse_norm_kind(o.synth_norm);
  s.B = o.B;
  s.count = o.synth_count;
  s.seed = o.synth_seed;
  const lao::SyntheticData gen = lao::synth(s);
  const lao::FileFormat format = lao::parse_file_format(o.format);
  emit(o.out, [&](std::ostream& out) { lao::write_dataset(out, gen.dataset, format); });
  if (!o.true_w.empty()) {
    emit(o.true_w, [&](std::ostream& out) { lao::write_regressor(out, gen.true_w); });
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const auto cli = parse_with_config(argc, argv);
    const std::string name = cli->app->get_subcommands().front()->get_name();
    const Options& o = cli->options;
    if (name == "train") return run_train(o);
    if (name == "curve") return run_curve(o);
    if (name == "tune") return run_tune(o);
    return run_synth(o);
  } catch (const ExitRequest& e) {
    return e.code;
  } catch (const lao::Error& e) {
    std::cerr << "lao: " << e.what() << '\n';
    switch (e.kind()) {
      case lao::ErrorKind::Usage:
        return kUsage;
      case lao::ErrorKind::Data:
        return kDataError;
      case lao::ErrorKind::Numerical:
        return kNumerical;
    }
  } catch (const std::exception& e) {
    std::cerr << "lao: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}
