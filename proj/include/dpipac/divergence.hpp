#pragma once

// Divergences between finite discrete distributions, the binary KL function
// and its inversion, and Markov-kernel pushforwards.
//
// Power sums sum_x P(x)^a Q(x)^(1-a) are always accumulated in the log
// domain so that orders around 1e7 neither overflow nor underflow.
// Conventions: 0 * ln 0 = 0, and P(x) > 0 with Q(x) = 0 gives +infinity
// for every order > 1.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dpipac {

/// A scalar probability in [0, 1]. Construction rejects anything else,
/// including NaN.
class Prob {
 public:
  constexpr Prob() = default;
  Prob(double value);  // NOLINT(google-explicit-constructor)

  constexpr operator double() const { return value_; }  // NOLINT
  constexpr double value() const { return value_; }

 private:
  double value_ = 0.0;
};

/// Nonnegative extended real produced by a divergence.
///
/// The value is carried together with its natural logarithm. For large
/// orders the Hellinger divergence legitimately exceeds the double range
/// (it grows like e^((p-1) D_p)); the log stays finite in that case and is
/// what downstream bounds consume. +infinity is reserved for the support
/// condition failing (P has mass where Q has none).
class DivergenceValue {
 public:
  DivergenceValue() = default;
  DivergenceValue(double value);  // NOLINT(google-explicit-constructor)

  static DivergenceValue from_log(double log_value);
  static DivergenceValue infinity();

  /// exp(log_value()); may round to +inf for representable-only-in-log
  /// values, check is_infinite() for the support condition.
  double value() const { return value_; }
  double log_value() const { return log_value_; }
  bool is_infinite() const;
  bool is_finite() const { return !is_infinite(); }

 private:
  double value_ = 0.0;
  double log_value_ = -std::numeric_limits<double>::infinity();
};

/// true when a <= b + slack, comparing in the log domain if either value
/// overflowed the double range.
bool within_slack(const DivergenceValue& a, const DivergenceValue& b,
                  double slack);

class DiscreteDistribution {
 public:
  static constexpr double kNormalizationTolerance = 1e-9;

  /// Throws std::invalid_argument if empty, any mass is negative or
  /// non-finite, or the masses do not sum to 1 within tolerance.
  explicit DiscreteDistribution(std::vector<double> masses);

  static DiscreteDistribution uniform(std::size_t size);
  static DiscreteDistribution point_mass(std::size_t size, std::size_t at);
  static DiscreteDistribution bernoulli(double p);

  std::size_t size() const { return masses_.size(); }
  std::span<const double> masses() const { return masses_; }
  double operator[](std::size_t i) const { return masses_[i]; }
  double min_mass() const;

  /// Probability of the event selected by `membership`.
  double event_mass(const std::vector<bool>& membership) const;

 private:
  std::vector<double> masses_;
};

/// Row-stochastic kernel W(y|x); row x is a distribution over outputs.
class MarkovKernel {
 public:
  explicit MarkovKernel(std::vector<DiscreteDistribution> rows);

  static MarkovKernel identity(std::size_t size);
  /// Every input maps to the same output distribution.
  static MarkovKernel constant(std::size_t inputs, const DiscreteDistribution& row);
  /// Deterministic two-output kernel: y = 1 iff x is in the event.
  static MarkovKernel event_indicator(const std::vector<bool>& membership);

  std::size_t input_size() const { return rows_.size(); }
  std::size_t output_size() const { return rows_.front().size(); }
  const DiscreteDistribution& row(std::size_t x) const { return rows_[x]; }

 private:
  std::vector<DiscreteDistribution> rows_;
};

/// Binary KL(p || q) in nats. +inf when q = 0 < p or p < 1 = q.
double binary_kl(Prob p, Prob q);

/// Largest q in [p_hat, 1) with binary_kl(p_hat, q) <= budget, found by
/// 100 rounds of bisection. p_hat = 1 returns 1; budget = 0 returns p_hat.
Prob kl_inverse_upper(Prob p_hat, double budget);

/// min(1, p_hat + sqrt(budget / 2)); never below kl_inverse_upper.
Prob pinsker_risk_bound(Prob p_hat, double budget);

/// ln sum_x P(x)^a Q(x)^(1-a) for a > 1. +inf on support failure.
double log_power_sum(const DiscreteDistribution& p, const DiscreteDistribution& q,
                     double a);

DivergenceValue renyi_divergence(const DiscreteDistribution& p,
                                 const DiscreteDistribution& q, double alpha);

DivergenceValue chi_squared_divergence(const DiscreteDistribution& p,
                                       const DiscreteDistribution& q);

DivergenceValue hellinger_p_divergence(const DiscreteDistribution& p,
                                       const DiscreteDistribution& q, double order);

/// Convex generator f with f(1) = 0.
///
/// `f` must also be defined at 0 (returning the limit f(0+)), since terms
/// with P(x) = 0 evaluate Q(x) f(0). `slope_at_infinity` is lim f(t)/t,
/// used for points where Q(x) = 0; when absent those points give +inf.
struct FGenerator {
  std::function<double(double)> f;
  std::optional<double> slope_at_infinity;

  static FGenerator kl();
  static FGenerator chi_squared();
  static FGenerator hellinger(double order);
  static FGenerator total_variation();
};

/// sum_x Q(x) f(P(x)/Q(x)). Rejects generators with f(1) != 0 or that fail
/// a midpoint-convexity spot check on [0.01, 100]; passing the check is
/// not a proof of convexity.
DivergenceValue f_divergence(const DiscreteDistribution& p,
                             const DiscreteDistribution& q, const FGenerator& gen);

DiscreteDistribution pushforward(const MarkovKernel& kernel,
                                 const DiscreteDistribution& p);

enum class DivergenceKind { kRenyi, kChiSquared, kHellinger, kKl };

struct DivergenceSpec {
  DivergenceKind kind = DivergenceKind::kChiSquared;
  double order = 2.0;  // Renyi alpha or Hellinger p; unused otherwise

  static DivergenceSpec renyi(double alpha) { return {DivergenceKind::kRenyi, alpha}; }
  static DivergenceSpec chi_squared() { return {DivergenceKind::kChiSquared, 2.0}; }
  static DivergenceSpec hellinger(double p) { return {DivergenceKind::kHellinger, p}; }
  static DivergenceSpec kl() { return {DivergenceKind::kKl, 1.0}; }

  std::string name() const;
};

DivergenceValue evaluate(const DivergenceSpec& spec, const DiscreteDistribution& p,
                         const DiscreteDistribution& q);

struct DpiComparison {
  DivergenceValue pushed;    // D(P_Y || Q_Y)
  DivergenceValue original;  // D(P_X || Q_X)

  bool holds(double slack = 1e-12) const { return within_slack(pushed, original, slack); }
};

DpiComparison dpi_check(const MarkovKernel& kernel, const DiscreteDistribution& p,
                        const DiscreteDistribution& q, const DivergenceSpec& spec);

}  // namespace dpipac
