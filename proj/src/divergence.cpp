#include "dpipac/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dpipac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_support(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("distributions have different support sizes");
  }
}

// ln(e^x - 1) for x > 0 without overflow for large x.
double log_expm1(double x) {
  if (x > 30.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

}  // namespace

Prob::Prob(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("probability outside [0, 1]: " + std::to_string(value));
  }
}

DivergenceValue::DivergenceValue(double value) {
  if (std::isnan(value) || value < 0.0) {
    throw std::invalid_argument("divergence value must be nonnegative");
  }
  value_ = value;
  log_value_ = std::log(value);
}

DivergenceValue DivergenceValue::from_log(double log_value) {
  if (std::isnan(log_value)) throw std::invalid_argument("divergence log value is NaN");
  DivergenceValue d;
  d.log_value_ = log_value;
  d.value_ = std::exp(log_value);
  return d;
}

DivergenceValue DivergenceValue::infinity() { return DivergenceValue(kInf); }

bool DivergenceValue::is_infinite() const { return log_value_ == kInf; }

bool within_slack(const DivergenceValue& a, const DivergenceValue& b, double slack) {
  if (b.is_infinite()) return true;
  if (a.is_infinite()) return false;
  if (std::isfinite(a.value()) && std::isfinite(b.value())) {
    return a.value() <= b.value() + slack;
  }
  return a.log_value() <= b.log_value() + slack;
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> masses)
    : masses_(std::move(masses)) {
  if (masses_.empty()) throw std::invalid_argument("distribution needs at least one point");
  double total = 0.0;
  for (double m : masses_) {
    if (!std::isfinite(m) || m < 0.0) {
      throw std::invalid_argument("distribution mass must be finite and nonnegative");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "distribution masses sum to %.17g, not 1", total);
    throw std::invalid_argument(buf);
  }
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t size) {
  if (size == 0) throw std::invalid_argument("uniform distribution needs size >= 1");
  return DiscreteDistribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

DiscreteDistribution DiscreteDistribution::point_mass(std::size_t size, std::size_t at) {
  if (at >= size) throw std::invalid_argument("point mass index out of range");
  std::vector<double> m(size, 0.0);
  m[at] = 1.0;
  return DiscreteDistribution(std::move(m));
}

DiscreteDistribution DiscreteDistribution::bernoulli(double p) {
  const Prob prob(p);
  return DiscreteDistribution({1.0 - prob, prob});
}

double DiscreteDistribution::min_mass() const {
  return *std::min_element(masses_.begin(), masses_.end());
}

double DiscreteDistribution::event_mass(const std::vector<bool>& membership) const {
  if (membership.size() != masses_.size()) {
    throw std::invalid_argument("event mask length does not match support size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    if (membership[i]) total += masses_[i];
  }
  return std::min(total, 1.0);
}

MarkovKernel::MarkovKernel(std::vector<DiscreteDistribution> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("kernel needs at least one input symbol");
  const std::size_t outputs = rows_.front().size();
  for (const auto& r : rows_) {
    if (r.size() != outputs) {
      throw std::invalid_argument("kernel rows have different output alphabet sizes");
    }
  }
}

MarkovKernel MarkovKernel::identity(std::size_t size) {
  std::vector<DiscreteDistribution> rows;
  rows.reserve(size);
  for (std::size_t x = 0; x < size; ++x) rows.push_back(DiscreteDistribution::point_mass(size, x));
  return MarkovKernel(std::move(rows));
}

MarkovKernel MarkovKernel::constant(std::size_t inputs, const DiscreteDistribution& row) {
  return MarkovKernel(std::vector<DiscreteDistribution>(inputs, row));
}

MarkovKernel MarkovKernel::event_indicator(const std::vector<bool>& membership) {
  std::vector<DiscreteDistribution> rows;
  rows.reserve(membership.size());
  for (bool in_event : membership) {
    rows.push_back(DiscreteDistribution::point_mass(2, in_event ? 1 : 0));
  }
  return MarkovKernel(std::move(rows));
}

double binary_kl(Prob p, Prob q) {
  double total = 0.0;
  if (p > 0.0) {
    if (q == 0.0) return kInf;
    total += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q == 1.0) return kInf;
    total += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  return std::max(total, 0.0);
}

Prob kl_inverse_upper(Prob p_hat, double budget) {
  if (std::isnan(budget) || budget < 0.0) {
    throw std::invalid_argument("KL budget must be nonnegative");
  }
  if (p_hat >= 1.0) return 1.0;
  if (budget == 0.0) return p_hat;
  if (std::isinf(budget)) return 1.0;

  double lo = p_hat;
  double hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // adjacent doubles
    if (binary_kl(p_hat, mid) <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Prob pinsker_risk_bound(Prob p_hat, double budget) {
  if (std::isnan(budget) || budget < 0.0) {
    throw std::invalid_argument("KL budget must be nonnegative");
  }
  return std::min(1.0, p_hat + std::sqrt(budget / 2.0));
}

double log_power_sum(const DiscreteDistribution& p, const DiscreteDistribution& q, double a) {
  require_same_support(p, q);
  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (q[x] == 0.0) return kInf;
    terms.push_back(a * std::log(p[x]) + (1.0 - a) * std::log(q[x]));
  }
  const double shift = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - shift);
  return shift + std::log(sum);
}

DivergenceValue renyi_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q,
                                 double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("Renyi order must exceed 1");
  const double log_sum = log_power_sum(p, q, alpha);
  if (std::isinf(log_sum)) return DivergenceValue::infinity();
  return DivergenceValue(std::max(log_sum, 0.0) / (alpha - 1.0));
}

DivergenceValue chi_squared_divergence(const DiscreteDistribution& p,
                                       const DiscreteDistribution& q) {
  require_same_support(p, q);
  double sum = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (q[x] == 0.0) return DivergenceValue::infinity();
    sum += p[x] * p[x] / q[x];
  }
  return DivergenceValue(std::max(sum - 1.0, 0.0));
}

DivergenceValue hellinger_p_divergence(const DiscreteDistribution& p,
                                       const DiscreteDistribution& q, double order) {
  if (!(order > 1.0)) throw std::invalid_argument("Hellinger order must exceed 1");
  const double log_sum = log_power_sum(p, q, order);
  if (std::isinf(log_sum)) return DivergenceValue::infinity();
  if (log_sum <= 0.0) return DivergenceValue(0.0);
  // (p-1) H = e^L - 1
  return DivergenceValue::from_log(log_expm1(log_sum) - std::log(order - 1.0));
}

FGenerator FGenerator::kl() {
  return {[](double t) { return t == 0.0 ? 0.0 : t * std::log(t); }, kInf};
}

FGenerator FGenerator::chi_squared() {
  return {[](double t) { return t * t - 1.0; }, kInf};
}

FGenerator FGenerator::hellinger(double order) {
  if (!(order > 1.0)) throw std::invalid_argument("Hellinger order must exceed 1");
  return {[order](double t) { return (std::pow(t, order) - 1.0) / (order - 1.0); }, kInf};
}

FGenerator FGenerator::total_variation() {
  return {[](double t) { return 0.5 * std::abs(t - 1.0); }, 0.5};
}

DivergenceValue f_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q,
                             const FGenerator& gen) {
  require_same_support(p, q);
  if (!gen.f) throw std::invalid_argument("f-divergence generator is empty");
  const auto& f = gen.f;
  if (std::abs(f(1.0)) > 1e-12) throw std::invalid_argument("generator must satisfy f(1) = 0");

  // Midpoint spot check on [0.01, 100].
  constexpr double kProbe[3][2] = {{0.01, 1.0}, {1.0, 100.0}, {0.01, 100.0}};
  for (const auto& [a, b] : kProbe) {
    const double chord = 0.5 * (f(a) + f(b));
    const double mid = f(0.5 * (a + b));
    if (std::isnan(chord) || std::isnan(mid) || mid > chord + 1e-9 * (1.0 + std::abs(chord))) {
      throw std::invalid_argument("generator failed the midpoint convexity check");
    }
  }

  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    double term = 0.0;
    if (q[x] > 0.0) {
      term = q[x] * f(p[x] / q[x]);
    } else if (p[x] > 0.0) {
      if (!gen.slope_at_infinity) return DivergenceValue::infinity();
      term = p[x] * *gen.slope_at_infinity;
    }
    if (std::isnan(term)) throw std::invalid_argument("generator produced NaN");
    total += term;
  }
  if (std::isinf(total)) return DivergenceValue::infinity();
  return DivergenceValue(std::max(total, 0.0));
}

DiscreteDistribution pushforward(const MarkovKernel& kernel, const DiscreteDistribution& p) {
  if (kernel.input_size() != p.size()) {
    throw std::invalid_argument("kernel input alphabet does not match distribution support");
  }
  std::vector<double> out(kernel.output_size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    const auto& row = kernel.row(x);
    for (std::size_t y = 0; y < out.size(); ++y) out[y] += row[y] * p[x];
  }
  return DiscreteDistribution(std::move(out));
}

std::string DivergenceSpec::name() const {
  char buf[64];
  switch (kind) {
    case DivergenceKind::kRenyi:
      std::snprintf(buf, sizeof buf, "renyi(%g)", order);
      return buf;
    case DivergenceKind::kHellinger:
      std::snprintf(buf, sizeof buf, "hellinger(%g)", order);
      return buf;
    case DivergenceKind::kChiSquared:
      return "chi_squared";
    case DivergenceKind::kKl:
      return "kl";
  }
  return "unknown";
}

DivergenceValue evaluate(const DivergenceSpec& spec, const DiscreteDistribution& p,
                         const DiscreteDistribution& q) {
  switch (spec.kind) {
    case DivergenceKind::kRenyi:
      return renyi_divergence(p, q, spec.order);
    case DivergenceKind::kChiSquared:
      return chi_squared_divergence(p, q);
    case DivergenceKind::kHellinger:
      return hellinger_p_divergence(p, q, spec.order);
    case DivergenceKind::kKl:
      return f_divergence(p, q, FGenerator::kl());
  }
  throw std::invalid_argument("unknown divergence kind");
}

DpiComparison dpi_check(const MarkovKernel& kernel, const DiscreteDistribution& p,
                        const DiscreteDistribution& q, const DivergenceSpec& spec) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("distributions have different support sizes");
  }
  const auto p_out = pushforward(kernel, p);
  const auto q_out = pushforward(kernel, q);
  return {evaluate(spec, p_out, q_out), evaluate(spec, p, q)};
}

}  // namespace dpipac
