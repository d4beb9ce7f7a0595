#include "dpipac/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "dpipac/format.hpp"

namespace dpipac {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// Runs body(i) for i in [0, count) over contiguous blocks, one per worker.
template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body body) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t part = 0; part < workers; ++part) {
    threads.emplace_back([=, &body] {
      const std::size_t begin = count * part / workers;
      const std::size_t end = count * (part + 1) / workers;
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
}

void invalid(const std::string& field, const std::string& why) {
  throw std::invalid_argument(field + ": " + why);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_values.empty()) invalid("n_values", "must not be empty");
  for (std::size_t n : n_values) {
    if (n < 1) invalid("n_values", "every n must be at least 1");
  }
  if (hypothesis_count < 1) invalid("hypothesis_count", "must be at least 1");
  if (!(box_half_width > 0.0) || !std::isfinite(box_half_width)) {
    invalid("box_half_width", "must be positive and finite");
  }
  if (!std::isfinite(w_star[0]) || !std::isfinite(w_star[1])) invalid("w_star", "must be finite");
  if (!(delta > 0.0 && delta <= 1.0)) invalid("delta", "must lie in (0, 1]");
  if (trials < 1) invalid("trials", "must be at least 1");
  if (population_mc_samples < 1) invalid("population_mc_samples", "must be at least 1");
  for (double o : orders) {
    if (!(o > 1.0) || !std::isfinite(o)) invalid("orders", "every order must be finite and > 1");
  }
  if (workers < 1) invalid("workers", "must be at least 1");
}

std::vector<Hypothesis> sample_hypotheses(const ExperimentConfig& config, Rng& rng) {
  const double b = config.box_half_width;
  std::vector<Hypothesis> out(config.hypothesis_count);
  for (auto& h : out) {
    h.w[0] = rng.uniform(-b, b);
    h.w[1] = rng.uniform(-b, b);
  }
  return out;
}

std::vector<Sample> generate_dataset(std::size_t n, const Vec2& w_star, Rng& rng) {
  std::vector<Sample> out(n);
  for (auto& s : out) {
    s.x[0] = rng.normal();
    s.x[1] = rng.normal();
    s.y = rng.bernoulli(sigmoid(dot(s.x, w_star))) ? 1 : 0;
  }
  return out;
}

int predict(const Vec2& x, const Hypothesis& h) { return dot(x, h.w) > 0.0 ? 1 : 0; }

int zero_one_loss(const Sample& sample, const Hypothesis& h) {
  return predict(sample.x, h) != sample.y ? 1 : 0;
}

double empirical_loss(std::span<const Sample> samples, const Hypothesis& h) {
  if (samples.empty()) throw std::invalid_argument("empirical loss of an empty sample");
  std::size_t errors = 0;
  for (const auto& s : samples) errors += static_cast<std::size_t>(zero_one_loss(s, h));
  return static_cast<double>(errors) / static_cast<double>(samples.size());
}

double population_loss_oracle(const Hypothesis& h, const Vec2& w_star, std::size_t mc_samples,
                              Rng& rng) {
  if (mc_samples < 1) throw std::invalid_argument("mc_samples must be at least 1");
  double total = 0.0;
  for (std::size_t i = 0; i < mc_samples; ++i) {
    const Vec2 x = {rng.normal(), rng.normal()};
    const double p_one = sigmoid(dot(x, w_star));
    total += predict(x, h) == 1 ? 1.0 - p_one : p_one;
  }
  return total / static_cast<double>(mc_samples);
}

PopulationTable estimate_population_losses(const ExperimentConfig& config,
                                           std::span<const Hypothesis> hypotheses) {
  PopulationTable table;
  table.losses.resize(hypotheses.size());
  parallel_for(hypotheses.size(), config.workers, [&](std::size_t i) {
    Rng rng = Rng::derive(config.seed, "population", {i});
    table.losses[i] =
        population_loss_oracle(hypotheses[i], config.w_star, config.population_mc_samples, rng);
  });
  const double lo = 0.5 / static_cast<double>(config.population_mc_samples);
  const double hi = 1.0 - lo;
  for (auto& l : table.losses) {
    if (l < lo || l > hi) {
      l = std::clamp(l, lo, hi);
      ++table.clamped;
    }
  }
  return table;
}

std::vector<BoundKey> coverage_bounds(const ExperimentConfig& config) {
  std::vector<BoundKey> keys = {{Method::kOccamsRazor, std::nullopt},
                                {Method::kPacBayesPointMass, std::nullopt}};
  for (double o : config.orders) keys.push_back({Method::kDAlpha, o});
  for (double o : config.orders) keys.push_back({Method::kHellingerP, o});
  keys.push_back({Method::kChiSquared, std::nullopt});
  return keys;
}

double uniform_prior_budget(const BoundKey& key, std::size_t n, const ExperimentConfig& config) {
  return kl_budget(BoundRequest{key.method, n, config.delta, config.q_min(), key.order});
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t n,
                      std::span<const Hypothesis> hypotheses, const PopulationTable& population,
                      std::size_t trial_index) {
  if (population.losses.size() != hypotheses.size()) {
    throw std::invalid_argument("population table does not match hypothesis list");
  }
  Rng rng = Rng::derive(config.seed, "trial", {n, trial_index});
  const auto data = generate_dataset(n, config.w_star, rng);

  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.n = n;
  rec.population_loss = population.losses;
  rec.clamped_population_losses = population.clamped;
  rec.empirical_loss.reserve(hypotheses.size());
  rec.kl_gap.reserve(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const double emp = empirical_loss(data, hypotheses[i]);
    const double gap = binary_kl(emp, population.losses[i]);
    rec.empirical_loss.push_back(emp);
    rec.kl_gap.push_back(gap);
    rec.sup_kl_gap = std::max(rec.sup_kl_gap, gap);
  }
  for (const auto& key : coverage_bounds(config)) {
    rec.violations.emplace_back(key, rec.sup_kl_gap > uniform_prior_budget(key, n, config));
  }
  return rec;
}

std::vector<CoverageRow> coverage_estimate(const ExperimentConfig& config) {
  config.validate();
  Rng rng = Rng::derive(config.seed, "hypotheses");
  const auto hypotheses = sample_hypotheses(config, rng);
  const auto population = estimate_population_losses(config, hypotheses);
  return coverage_estimate(config, hypotheses, population);
}

std::vector<CoverageRow> coverage_estimate(const ExperimentConfig& config,
                                           std::span<const Hypothesis> hypotheses,
                                           const PopulationTable& population) {
  config.validate();
  const auto keys = coverage_bounds(config);
  // violations[n index][key index]
  std::vector<std::vector<std::size_t>> counts(config.n_values.size(),
                                               std::vector<std::size_t>(keys.size(), 0));
  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const std::size_t n = config.n_values[ni];
    std::vector<std::vector<char>> flags(config.trials);
    parallel_for(config.trials, config.workers, [&](std::size_t t) {
      const auto rec = run_trial(config, n, hypotheses, population, t);
      flags[t].reserve(rec.violations.size());
      for (const auto& [key, violated] : rec.violations) flags[t].push_back(violated ? 1 : 0);
    });
    for (const auto& f : flags) {
      for (std::size_t k = 0; k < keys.size(); ++k) counts[ni][k] += static_cast<std::size_t>(f[k]);
    }
  }

  std::vector<CoverageRow> rows;
  const double trials = static_cast<double>(config.trials);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
      CoverageRow row;
      row.bound = keys[k];
      row.n = config.n_values[ni];
      row.trials = config.trials;
      row.violations = counts[ni][k];
      row.frequency = static_cast<double>(row.violations) / trials;
      row.std_error = std::sqrt(row.frequency * (1.0 - row.frequency) / trials);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_coverage_csv(std::ostream& out, const std::vector<CoverageRow>& rows) {
  out << "method,order,n,trials,violations,frequency,stderr\n";
  for (const auto& r : rows) {
    out << method_name(r.bound.method) << ',' << format_optional(r.bound.order) << ',' << r.n
        << ',' << r.trials << ',' << r.violations << ',' << format_double(r.frequency) << ','
        << format_double(r.std_error) << '\n';
  }
}

std::vector<SweepRow> figure1_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<SweepRow> rows;
  for (const auto& key : coverage_bounds(config)) {
    for (std::size_t n : config.n_values) {
      rows.push_back({key.method, n, key.order, config.delta, config.q_min(),
                      uniform_prior_budget(key, n, config)});
    }
  }
  return rows;
}

void write_figure1_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "method,order,n,delta,q_min,kl_budget\n";
  for (const auto& r : rows) {
    out << method_name(r.method) << ',' << format_optional(r.order) << ',' << r.n << ','
        << format_double(r.delta) << ',' << format_double(r.q_min) << ','
        << format_double(r.kl_budget) << '\n';
  }
}

}  // namespace dpipac
