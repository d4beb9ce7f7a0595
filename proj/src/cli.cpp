#include "dpipac/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "dpipac/bounds.hpp"
#include "dpipac/change_of_measure.hpp"
#include "dpipac/config.hpp"
#include "dpipac/experiment.hpp"
#include "json.hpp"

namespace dpipac::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_seed_override(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("DPIPAC_SEED is not a nonnegative integer: '" + text + "'");
  }
}

// Writes to `path` when given, else to the primary output stream.
template <typename Writer>
void emit(const std::string& path, std::ostream& out, Writer write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot open output file " + path);
  write(file);
}

struct CertifyArgs {
  std::string method;
  std::size_t n = 0;
  double delta = 0.0;
  double empirical_loss = 0.0;
  double q_mass = 0.0;
  double order = 0.0;
  std::string prior;
  std::string hypothesis;
  CLI::Option* q_mass_opt = nullptr;
  CLI::Option* order_opt = nullptr;
  CLI::Option* hypothesis_opt = nullptr;
};

int cmd_certify(const CertifyArgs& a, Streams io) {
  const auto method = parse_method(a.method);
  if (!method) throw UsageError("unknown method '" + a.method + "'");
  if (a.n < 1) throw UsageError("--n must be at least 1");
  if (!(a.delta > 0.0 && a.delta <= 1.0)) throw UsageError("--delta must lie in (0, 1]");
  if (!(a.empirical_loss >= 0.0 && a.empirical_loss <= 1.0)) {
    throw UsageError("--empirical-loss must lie in [0, 1]");
  }
  if (method_requires_order(*method) && a.order_opt->count() == 0) {
    throw UsageError("--order is required for " + a.method);
  }
  const bool has_q = a.q_mass_opt->count() > 0;
  const bool has_prior = !a.prior.empty();
  if (has_q && has_prior) throw UsageError("give either --q-mass or --prior, not both");
  if (a.hypothesis_opt->count() > 0 && !has_prior) throw UsageError("--hypothesis needs --prior");

  BoundRequest request;
  request.method = *method;
  request.n = a.n;
  request.delta = a.delta;
  if (method_requires_order(*method)) request.order = a.order;

  if (has_prior) {
    const auto prior = load_prior(a.prior);
    request.q_mass = a.hypothesis_opt->count() > 0 ? prior.mass(a.hypothesis) : prior.q_min();
  } else if (has_q) {
    if (!(a.q_mass > 0.0 && a.q_mass <= 1.0)) throw UsageError("--q-mass must lie in (0, 1]");
    request.q_mass = a.q_mass;
  } else if (*method == Method::kTestSet) {
    request.q_mass = 1.0;
  } else {
    throw UsageError("--q-mass or --prior is required for " + a.method);
  }

  const auto cert = certify(request, a.empirical_loss);
  io.out << to_json(cert).dump(2) << '\n';
  return kSuccess;
}

struct CompareArgs {
  std::vector<std::string> methods = {"occams_razor", "pac_bayes_point_mass", "d_alpha",
                                      "hellinger_p", "chi_squared"};
  std::vector<std::size_t> n_values;
  std::vector<double> orders;
  double delta = 0.0;
  double q_min = 0.0;
  std::size_t hypothesis_count = 0;
  std::string prior;
  std::string config;
  std::string output;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* q_min_opt = nullptr;
  CLI::Option* count_opt = nullptr;
};

int cmd_compare(const CompareArgs& a, Streams io) {
  ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  SweepSpec spec;
  spec.n_values = a.n_values.empty() ? cfg.n_values : a.n_values;
  spec.orders = a.orders.empty() ? cfg.orders : a.orders;
  spec.delta = a.delta_opt->count() > 0 ? a.delta : cfg.delta;
  spec.q_min = cfg.q_min();

  const int q_sources = static_cast<int>(a.q_min_opt->count() > 0) +
                        static_cast<int>(a.count_opt->count() > 0) +
                        static_cast<int>(!a.prior.empty());
  if (q_sources > 1) throw UsageError("give at most one of --q-min, --hypothesis-count, --prior");
  if (a.q_min_opt->count() > 0) spec.q_min = a.q_min;
  if (a.count_opt->count() > 0) {
    if (a.hypothesis_count < 1) throw UsageError("--hypothesis-count must be at least 1");
    spec.q_min = 1.0 / static_cast<double>(a.hypothesis_count);
  }
  if (!a.prior.empty()) spec.q_min = load_prior(a.prior).q_min();

  for (const auto& name : a.methods) {
    const auto m = parse_method(name);
    if (!m) throw UsageError("unknown method '" + name + "'");
    spec.methods.push_back(*m);
  }
  if (spec.methods.empty() || spec.n_values.empty()) throw UsageError("empty method or n list");
  if (std::any_of(spec.n_values.begin(), spec.n_values.end(), [](auto n) { return n < 1; })) {
    throw UsageError("every n must be at least 1");
  }
  if (std::any_of(spec.methods.begin(), spec.methods.end(), method_requires_order) &&
      spec.orders.empty()) {
    throw UsageError("order list is empty");
  }
  if (std::any_of(spec.orders.begin(), spec.orders.end(),
                  [](double o) { return !(o > 1.0) || !std::isfinite(o); })) {
    throw UsageError("every order must be finite and greater than 1");
  }
  if (!(spec.delta > 0.0 && spec.delta <= 1.0)) throw UsageError("delta must lie in (0, 1]");
  if (!(spec.q_min > 0.0 && spec.q_min <= 1.0)) throw UsageError("q_min must lie in (0, 1]");

  const auto rows = sweep(spec);
  emit(a.output, io.out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
  return kSuccess;
}

struct ExperimentArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t workers = 0;
  std::size_t mc_samples = 0;
  std::vector<std::size_t> n_values;
  std::string output;
  std::string out_dir;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* mc_opt = nullptr;
};

void add_experiment_options(CLI::App& sub, ExperimentArgs& a) {
  sub.add_option("--config", a.config, "Flat JSON experiment configuration");
  a.seed_opt = sub.add_option("--seed", a.seed, "Master seed (overrides config and DPIPAC_SEED)");
  a.trials_opt = sub.add_option("--trials", a.trials, "Monte Carlo trials per n");
  a.workers_opt = sub.add_option("--workers", a.workers, "Worker threads (output is unaffected)");
  a.mc_opt = sub.add_option("--mc-samples", a.mc_samples, "Samples per population-loss estimate");
  sub.add_option("--n", a.n_values, "Sample sizes")->delimiter(',');
}

ExperimentConfig resolve_config(const ExperimentArgs& a,
                                const std::optional<std::string>& seed_override) {
  ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  if (seed_override) cfg.seed = parse_seed_override(*seed_override);
  if (a.seed_opt->count() > 0) cfg.seed = a.seed;
  if (a.trials_opt->count() > 0) cfg.trials = a.trials;
  if (a.workers_opt->count() > 0) cfg.workers = a.workers;
  if (a.mc_opt->count() > 0) cfg.population_mc_samples = a.mc_samples;
  if (!a.n_values.empty()) cfg.n_values = a.n_values;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

int cmd_coverage(const ExperimentArgs& a, Streams io,
                 const std::optional<std::string>& seed_override) {
  const auto cfg = resolve_config(a, seed_override);
  const auto rows = coverage_estimate(cfg);
  emit(a.output, io.out, [&](std::ostream& os) { write_coverage_csv(os, rows); });
  return kSuccess;
}

int cmd_experiment(const ExperimentArgs& a, Streams io,
                   const std::optional<std::string>& seed_override) {
  const auto cfg = resolve_config(a, seed_override);
  Rng rng = Rng::derive(cfg.seed, "hypotheses");
  const auto hypotheses = sample_hypotheses(cfg, rng);
  const auto population = estimate_population_losses(cfg, hypotheses);
  const auto budgets = figure1_sweep(cfg);
  const auto coverage = coverage_estimate(cfg, hypotheses, population);

  nlohmann::json hyp = nlohmann::json::array();
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    hyp.push_back({{"index", i}, {"w", hypotheses[i].w}, {"population_loss", population.losses[i]}});
  }
  auto order_json = [](const std::optional<double>& o) -> nlohmann::json {
    if (o) return *o;
    return nullptr;
  };
  nlohmann::json fig = nlohmann::json::array();
  for (const auto& r : budgets) {
    fig.push_back({{"method", method_name(r.method)},
                   {"order", order_json(r.order)},
                   {"n", r.n},
                   {"kl_budget", r.kl_budget}});
  }
  nlohmann::json cov = nlohmann::json::array();
  for (const auto& r : coverage) {
    cov.push_back({{"method", method_name(r.bound.method)},
                   {"order", order_json(r.bound.order)},
                   {"n", r.n},
                   {"trials", r.trials},
                   {"violations", r.violations},
                   {"frequency", r.frequency},
                   {"stderr", r.std_error}});
  }
  const nlohmann::json doc = {{"config", to_json(cfg)},
                              {"q_min", cfg.q_min()},
                              {"population_clamped", population.clamped},
                              {"hypotheses", hyp},
                              {"figure1", fig},
                              {"coverage", cov}};

  if (!a.out_dir.empty()) {
    std::filesystem::create_directories(a.out_dir);
    const std::filesystem::path dir(a.out_dir);
    emit((dir / "figure1.csv").string(), io.out,
         [&](std::ostream& os) { write_figure1_csv(os, budgets); });
    emit((dir / "coverage.csv").string(), io.out,
         [&](std::ostream& os) { write_coverage_csv(os, coverage); });
  }
  emit(a.output, io.out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return kSuccess;
}

struct VerifyArgs {
  LemmaVerificationOptions options;
  CLI::Option* seed_opt = nullptr;
};

int cmd_verify(VerifyArgs a, Streams io, const std::optional<std::string>& seed_override) {
  if (seed_override && a.seed_opt->count() == 0) {
    a.options.seed = parse_seed_override(*seed_override);
  }
  if (a.options.max_support < 2) throw UsageError("--max-support must be at least 2");
  if (a.options.workers < 1) throw UsageError("--workers must be at least 1");
  if (a.options.orders.empty() ||
      std::any_of(a.options.orders.begin(), a.options.orders.end(),
                  [](double o) { return !(o > 1.0) || !std::isfinite(o); })) {
    throw UsageError("orders must be finite and greater than 1");
  }
  const auto report = verify_lemmas(a.options);
  io.out << to_json(report).dump(2) << '\n';
  if (report.violations > 0) {
    io.err << "verification failed: " << report.violations << " violation(s)\n";
    return kFailure;
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, Streams io,
        const std::optional<std::string>& seed_override) {
  CLI::App app{"Generalization-bound certificates over finite hypothesis spaces", "dpipac"};
  app.require_subcommand(1);

  CertifyArgs certify_args;
  auto* certify_cmd = app.add_subcommand("certify", "Certify a population-risk upper bound");
  certify_cmd->add_option("--method", certify_args.method, "Bound method")->required();
  certify_cmd->add_option("--n", certify_args.n, "Sample count")->required();
  certify_cmd->add_option("--delta", certify_args.delta, "Confidence parameter")->required();
  certify_cmd->add_option("--empirical-loss", certify_args.empirical_loss, "Empirical loss")
      ->required();
  certify_args.q_mass_opt =
      certify_cmd->add_option("--q-mass", certify_args.q_mass, "Prior mass (or Q_min)");
  certify_args.order_opt =
      certify_cmd->add_option("--order", certify_args.order, "Order for d_alpha / hellinger_p");
  certify_cmd->add_option("--prior", certify_args.prior, "Prior file (JSON)");
  certify_args.hypothesis_opt = certify_cmd->add_option(
      "--hypothesis", certify_args.hypothesis, "Hypothesis id in the prior file");

  CompareArgs compare_args;
  auto* compare_cmd = app.add_subcommand("compare", "Tabulate KL budgets across methods and n");
  compare_cmd->add_option("--methods", compare_args.methods, "Methods")->delimiter(',');
  compare_cmd->add_option("--n", compare_args.n_values, "Sample sizes")->delimiter(',');
  compare_cmd->add_option("--orders", compare_args.orders, "Orders")->delimiter(',');
  compare_args.delta_opt = compare_cmd->add_option("--delta", compare_args.delta, "Confidence");
  compare_args.q_min_opt = compare_cmd->add_option("--q-min", compare_args.q_min, "Q_min");
  compare_args.count_opt = compare_cmd->add_option(
      "--hypothesis-count", compare_args.hypothesis_count, "Uniform prior over this many");
  compare_cmd->add_option("--prior", compare_args.prior, "Prior file (JSON)");
  compare_cmd->add_option("--config", compare_args.config, "Experiment configuration");
  compare_cmd->add_option("--output", compare_args.output, "Write CSV here instead of stdout");

  ExperimentArgs coverage_args;
  auto* coverage_cmd = app.add_subcommand("coverage", "Monte Carlo coverage of the bounds");
  add_experiment_options(*coverage_cmd, coverage_args);
  coverage_cmd->add_option("--output", coverage_args.output, "Write CSV here instead of stdout");

  ExperimentArgs experiment_args;
  auto* experiment_cmd =
      app.add_subcommand("experiment", "Full synthetic experiment: budgets and coverage");
  add_experiment_options(*experiment_cmd, experiment_args);
  experiment_cmd->add_option("--output", experiment_args.output, "Write JSON here");
  experiment_cmd->add_option("--out-dir", experiment_args.out_dir,
                             "Also write figure1.csv and coverage.csv here");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Randomized check of change-of-measure bounds");
  verify_cmd->add_option("--trials", verify_args.options.trials, "Random instances");
  verify_cmd->add_option("--max-support", verify_args.options.max_support, "Largest support");
  verify_args.seed_opt = verify_cmd->add_option("--seed", verify_args.options.seed, "Seed");
  verify_cmd->add_option("--workers", verify_args.options.workers, "Worker threads");
  verify_cmd->add_option("--orders", verify_args.options.orders, "Orders")->delimiter(',');
  verify_cmd->add_flag("--force-equal", verify_args.options.force_equal, "Use Q = P");
  verify_cmd->add_option("--inject-slack", verify_args.options.bound_offset,
                         "Test hook: offset added to every bound");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*certify_cmd) return cmd_certify(certify_args, io);
    if (*compare_cmd) return cmd_compare(compare_args, io);
    if (*coverage_cmd) return cmd_coverage(coverage_args, io, seed_override);
    if (*experiment_cmd) return cmd_experiment(experiment_args, io, seed_override);
    if (*verify_cmd) return cmd_verify(verify_args, io, seed_override);
  } catch (const UsageError& e) {
    io.err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace dpipac::cli
