#pragma once

// Right-hand sides of KL-form generalization bounds,
//   KL(empirical_loss || population_loss) <= kl_budget,
// over a finite hypothesis space, and their conversion into population-risk
// certificates. All logarithms are natural.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpipac/divergence.hpp"
#include "json.hpp"

namespace dpipac {

enum class Method {
  kTestSet,
  kOccamsRazor,
  kPacBayesPointMass,
  kDAlpha,
  kHellingerP,
  kChiSquared,
  kLimitOr,
  kChiSquaredCorollary,
};

std::string_view method_name(Method m);
/// Accepts the names produced by method_name; nullopt otherwise.
std::optional<Method> parse_method(std::string_view name);
bool method_requires_order(Method m);
std::vector<Method> all_methods();

/// ln(1/delta) / n
double rhs_test_set(std::size_t n, double delta);
/// (ln(1/q) + ln(1/delta)) / n
double rhs_occams_razor(std::size_t n, double delta, double q_mass);
/// (ln(1/q) + ln(2 sqrt(n) / delta)) / n, PAC-Bayes-KL with a point-mass posterior.
double rhs_pac_bayes_point_mass(std::size_t n, double delta, double q_mass);
/// (ln(1/q_min) + alpha/(alpha-1) ln(1/delta)) / n
double rhs_d_alpha(std::size_t n, double delta, double q_min, double alpha);
/// ln(q_min^(1-p) delta^(-p) - 1) / ((p-1) n), evaluated without forming the
/// power. Never exceeds rhs_d_alpha at the same order. Negative when delta
/// is not small enough for the bound to apply; throws when delta = q_min = 1.
double rhs_hellinger_p(std::size_t n, double delta, double q_min, double p);
/// (ln((1+q_min)/q_min) + 2 ln(1/delta)) / n
double rhs_chi_squared(std::size_t n, double delta, double q_min);
/// The alpha, p -> infinity limit; identical to rhs_occams_razor.
double rhs_limit_or(std::size_t n, double delta, double q_mass);
/// rhs_chi_squared with the hypothesis's own prior mass (uniform prior).
double rhs_chi_squared_corollary(std::size_t n, double delta, double q_mass);

struct BoundRequest {
  Method method = Method::kOccamsRazor;
  std::size_t n = 1;
  double delta = 0.05;
  /// Prior mass of the evaluated hypothesis, or Q_min for the
  /// d_alpha / hellinger_p / chi_squared forms. Ignored by test_set.
  double q_mass = 1.0;
  std::optional<double> order;

  /// Throws std::invalid_argument on out-of-range fields or a missing order.
  void validate() const;
};

/// Dispatches to the method's right-hand side.
double kl_budget(const BoundRequest& request);

struct BoundCertificate {
  BoundRequest request;
  double kl_budget = 0.0;
  Prob empirical_loss;
  Prob risk_upper;
  Prob risk_upper_pinsker;
  std::vector<std::string> warnings;
};

/// Throws std::invalid_argument on an invalid request, and
/// std::domain_error when the bound yields a negative KL budget (Hellinger
/// form with delta too large).
BoundCertificate certify(const BoundRequest& request, Prob empirical_loss);

nlohmann::json to_json(const BoundCertificate& cert);

struct SweepSpec {
  std::vector<Method> methods;
  std::vector<std::size_t> n_values;
  double delta = 0.025;
  double q_min = 1.0 / 50.0;
  std::vector<double> orders;  // used by d_alpha and hellinger_p only
};

struct SweepRow {
  Method method;
  std::size_t n;
  std::optional<double> order;
  double delta;
  double q_min;
  double kl_budget;
};

/// Rows ordered by method (as listed), then n, then order.
std::vector<SweepRow> sweep(const SweepSpec& spec);

/// Header `method,n,order,delta,q_min,kl_budget`; order is empty for
/// parameter-free methods.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace dpipac
