#include "dpipac/bounds.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dpipac/format.hpp"

namespace dpipac {

namespace {

struct MethodEntry {
  Method method;
  std::string_view name;
  bool needs_order;
};

constexpr std::array<MethodEntry, 8> kMethods = {{
    {Method::kTestSet, "test_set", false},
    {Method::kOccamsRazor, "occams_razor", false},
    {Method::kPacBayesPointMass, "pac_bayes_point_mass", false},
    {Method::kDAlpha, "d_alpha", true},
    {Method::kHellingerP, "hellinger_p", true},
    {Method::kChiSquared, "chi_squared", false},
    {Method::kLimitOr, "limit_or", false},
    {Method::kChiSquaredCorollary, "chi_squared_corollary", false},
}};

const MethodEntry& entry(Method m) {
  for (const auto& e : kMethods) {
    if (e.method == m) return e;
  }
  throw std::invalid_argument("unknown method");
}

void check_common(std::size_t n, double delta) {
  if (n < 1) throw std::invalid_argument("sample count n must be at least 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
}

void check_mass(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("prior mass must lie in (0, 1]");
}

void check_order(double order) {
  if (!(order > 1.0) || !std::isfinite(order)) {
    throw std::invalid_argument("order must be a finite value greater than 1");
  }
}

}  // namespace

std::string_view method_name(Method m) { return entry(m).name; }

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& e : kMethods) {
    if (e.name == name) return e.method;
  }
  return std::nullopt;
}

bool method_requires_order(Method m) { return entry(m).needs_order; }

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (const auto& e : kMethods) out.push_back(e.method);
  return out;
}

double rhs_test_set(std::size_t n, double delta) {
  check_common(n, delta);
  return -std::log(delta) / static_cast<double>(n);
}

double rhs_occams_razor(std::size_t n, double delta, double q_mass) {
  check_common(n, delta);
  check_mass(q_mass);
  return (-std::log(q_mass) - std::log(delta)) / static_cast<double>(n);
}

double rhs_pac_bayes_point_mass(std::size_t n, double delta, double q_mass) {
  check_common(n, delta);
  check_mass(q_mass);
  const double nd = static_cast<double>(n);
  return (-std::log(q_mass) + std::log(2.0 * std::sqrt(nd)) - std::log(delta)) / nd;
}

double rhs_d_alpha(std::size_t n, double delta, double q_min, double alpha) {
  check_common(n, delta);
  check_mass(q_min);
  check_order(alpha);
  return (-std::log(q_min) - alpha / (alpha - 1.0) * std::log(delta)) / static_cast<double>(n);
}

double rhs_hellinger_p(std::size_t n, double delta, double q_min, double p) {
  // With X = q^(1-p) delta^(-p): ln(X - 1) = ln X + ln(1 - 1/X), and
  // ln X / ((p-1) n) is exactly the d_alpha right-hand side at alpha = p.
  const double base = rhs_d_alpha(n, delta, q_min, p);
  const double log_x = (p - 1.0) * -std::log(q_min) + p * -std::log(delta);
  if (log_x == 0.0) {
    throw std::invalid_argument("Hellinger bound undefined for delta = q_min = 1");
  }
  // 1/X = delta^p q^(p-1); underflows to 0 for large p, dropping a term
  // far below double resolution.
  return base + std::log1p(-std::exp(-log_x)) / ((p - 1.0) * static_cast<double>(n));
}

double rhs_chi_squared(std::size_t n, double delta, double q_min) {
  check_common(n, delta);
  check_mass(q_min);
  return (std::log1p(q_min) - std::log(q_min) - 2.0 * std::log(delta)) / static_cast<double>(n);
}

double rhs_limit_or(std::size_t n, double delta, double q_mass) {
  return rhs_occams_razor(n, delta, q_mass);
}

double rhs_chi_squared_corollary(std::size_t n, double delta, double q_mass) {
  return rhs_chi_squared(n, delta, q_mass);
}

void BoundRequest::validate() const {
  entry(method);
  check_common(n, delta);
  check_mass(q_mass);
  if (method_requires_order(method)) {
    if (!order) {
      throw std::invalid_argument(std::string(method_name(method)) + " requires an order");
    }
    check_order(*order);
  }
}

double kl_budget(const BoundRequest& r) {
  r.validate();
  switch (r.method) {
    case Method::kTestSet:
      return rhs_test_set(r.n, r.delta);
    case Method::kOccamsRazor:
      return rhs_occams_razor(r.n, r.delta, r.q_mass);
    case Method::kPacBayesPointMass:
      return rhs_pac_bayes_point_mass(r.n, r.delta, r.q_mass);
    case Method::kDAlpha:
      return rhs_d_alpha(r.n, r.delta, r.q_mass, *r.order);
    case Method::kHellingerP:
      return rhs_hellinger_p(r.n, r.delta, r.q_mass, *r.order);
    case Method::kChiSquared:
      return rhs_chi_squared(r.n, r.delta, r.q_mass);
    case Method::kLimitOr:
      return rhs_limit_or(r.n, r.delta, r.q_mass);
    case Method::kChiSquaredCorollary:
      return rhs_chi_squared_corollary(r.n, r.delta, r.q_mass);
  }
  throw std::invalid_argument("unknown method");
}

BoundCertificate certify(const BoundRequest& request, Prob empirical_loss) {
  BoundCertificate cert;
  cert.request = request;
  if (!method_requires_order(request.method)) cert.request.order.reset();
  cert.empirical_loss = empirical_loss;
  cert.kl_budget = kl_budget(request);

  if (request.method == Method::kHellingerP) {
    if (request.delta >= 0.5) {
      cert.warnings.emplace_back(
          "hellinger_p holds only for sufficiently small delta; delta >= 0.5 is outside the "
          "range where the guarantee is known to apply");
    }
    if (cert.kl_budget < 0.0) {
      throw std::domain_error(
          "hellinger_p gives a negative KL budget at this delta and q_mass; delta is too large "
          "for the bound to apply");
    }
  }

  cert.risk_upper = kl_inverse_upper(empirical_loss, cert.kl_budget);
  cert.risk_upper_pinsker = pinsker_risk_bound(empirical_loss, cert.kl_budget);
  return cert;
}

nlohmann::json to_json(const BoundCertificate& cert) {
  const auto& r = cert.request;
  nlohmann::json order = nullptr;
  if (r.order) order = *r.order;
  return {{"method", method_name(r.method)},
          {"n", r.n},
          {"delta", r.delta},
          {"q_mass", r.q_mass},
          {"order", order},
          {"kl_budget", cert.kl_budget},
          {"empirical_loss", cert.empirical_loss.value()},
          {"risk_upper", cert.risk_upper.value()},
          {"risk_upper_pinsker", cert.risk_upper_pinsker.value()},
          {"warnings", cert.warnings}};
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  for (Method m : spec.methods) {
    for (std::size_t n : spec.n_values) {
      if (method_requires_order(m)) {
        for (double order : spec.orders) {
          BoundRequest r{m, n, spec.delta, spec.q_min, order};
          rows.push_back({m, n, order, spec.delta, spec.q_min, kl_budget(r)});
        }
      } else {
        BoundRequest r{m, n, spec.delta, spec.q_min, std::nullopt};
        rows.push_back({m, n, std::nullopt, spec.delta, spec.q_min, kl_budget(r)});
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "method,n,order,delta,q_min,kl_budget\n";
  for (const auto& row : rows) {
    out << method_name(row.method) << ',' << row.n << ',' << format_optional(row.order) << ','
        << format_double(row.delta) << ',' << format_double(row.q_min) << ','
        << format_double(row.kl_budget) << '\n';
  }
}

}  // namespace dpipac
