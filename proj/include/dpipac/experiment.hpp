#pragma once

// Synthetic 2-D logistic classification task over a finite hypothesis
// space: x ~ N(0, I_2), y ~ Bernoulli(sigmoid(x . w_star)), 0-1 loss of the
// linear sign predictor. Used for the bound comparison sweep and for Monte
// Carlo coverage checks of the 1 - delta guarantees.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "dpipac/bounds.hpp"
#include "dpipac/rng.hpp"

namespace dpipac {

using Vec2 = std::array<double, 2>;

struct Hypothesis {
  Vec2 w{};
};

struct Sample {
  Vec2 x{};
  int y = 0;  // 0 or 1
};

struct ExperimentConfig {
  std::vector<std::size_t> n_values = {100, 200, 400, 800, 1600};
  std::size_t hypothesis_count = 50;
  double box_half_width = 100.0;
  Vec2 w_star = {0.5, 0.5};
  double delta = 0.025;
  std::uint64_t seed = 1;
  std::size_t trials = 2000;
  std::size_t population_mc_samples = 1000000;
  std::vector<double> orders = {10.0, 1e3, 1e7};
  /// Threads used for trials and population estimates; never changes output.
  std::size_t workers = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  double q_min() const { return 1.0 / static_cast<double>(hypothesis_count); }
};

/// Coordinates i.i.d. uniform on [-box_half_width, box_half_width].
std::vector<Hypothesis> sample_hypotheses(const ExperimentConfig& config, Rng& rng);

std::vector<Sample> generate_dataset(std::size_t n, const Vec2& w_star, Rng& rng);

/// Predicts 1 iff x . w > 0 (a zero score predicts 0).
int predict(const Vec2& x, const Hypothesis& h);
int zero_one_loss(const Sample& sample, const Hypothesis& h);
double empirical_loss(std::span<const Sample> samples, const Hypothesis& h);

/// Monte Carlo estimate of the population 0-1 loss, averaging the
/// conditional error probability given x over `mc_samples` fresh draws.
double population_loss_oracle(const Hypothesis& h, const Vec2& w_star,
                              std::size_t mc_samples, Rng& rng);

/// Population losses for a hypothesis list, one derived stream per
/// hypothesis, clamped to [1/(2m), 1 - 1/(2m)] so KL gaps stay finite.
struct PopulationTable {
  std::vector<double> losses;
  std::size_t clamped = 0;
};

PopulationTable estimate_population_losses(const ExperimentConfig& config,
                                           std::span<const Hypothesis> hypotheses);

struct BoundKey {
  Method method;
  std::optional<double> order;

  friend bool operator==(const BoundKey&, const BoundKey&) = default;
};

/// occams_razor, pac_bayes_point_mass, d_alpha and hellinger_p at each
/// configured order, chi_squared.
std::vector<BoundKey> coverage_bounds(const ExperimentConfig& config);

/// Uniform-prior KL budget for one bound.
double uniform_prior_budget(const BoundKey& key, std::size_t n, const ExperimentConfig& config);

struct TrialRecord {
  std::size_t trial_index = 0;
  std::size_t n = 0;
  std::vector<double> empirical_loss;
  std::vector<double> population_loss;
  std::vector<double> kl_gap;
  double sup_kl_gap = 0.0;
  std::vector<std::pair<BoundKey, bool>> violations;
  std::size_t clamped_population_losses = 0;
};

/// Draws a fresh size-n dataset from the (seed, n, trial_index) stream and
/// flags every bound whose budget the largest KL gap exceeds.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t n,
                      std::span<const Hypothesis> hypotheses, const PopulationTable& population,
                      std::size_t trial_index);

struct CoverageRow {
  BoundKey bound;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double frequency = 0.0;
  double std_error = 0.0;  // sqrt(f (1 - f) / trials)
};

/// Rows grouped by bound (coverage_bounds order), then n.
std::vector<CoverageRow> coverage_estimate(const ExperimentConfig& config);

/// Same, reusing already sampled hypotheses and population losses.
std::vector<CoverageRow> coverage_estimate(const ExperimentConfig& config,
                                           std::span<const Hypothesis> hypotheses,
                                           const PopulationTable& population);

/// Header `method,order,n,trials,violations,frequency,stderr`.
void write_coverage_csv(std::ostream& out, const std::vector<CoverageRow>& rows);

/// Budget table for the uniform prior q_min = 1/hypothesis_count: rows
/// grouped by bound (coverage_bounds order), then n.
std::vector<SweepRow> figure1_sweep(const ExperimentConfig& config);

/// Header `method,order,n,delta,q_min,kl_budget`.
void write_figure1_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace dpipac
