#include "dpipac/change_of_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "dpipac/rng.hpp"

namespace dpipac {

namespace {

// ln(1 + e^x)
double softplus(double x) {
  if (x == std::numeric_limits<double>::infinity()) return x;
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void require_finite(const DivergenceValue& d, const char* what) {
  if (d.is_infinite()) {
    throw std::invalid_argument(std::string(what) + " must be finite for a change-of-measure bound");
  }
}

enum Check : std::size_t {
  kLemmaRenyi,
  kLemmaHellinger,
  kLemmaChi2,
  kDpiRenyi,
  kDpiChi2,
  kDpiHellinger,
  kDpiKl,
  kCheckCount
};

constexpr const char* kCheckNames[kCheckCount] = {
    "lemma1_renyi", "lemma2_hellinger", "lemma3_chi_squared", "dpi_renyi",
    "dpi_chi_squared", "dpi_hellinger", "dpi_kl"};

std::vector<CheckTally> empty_tallies() {
  std::vector<CheckTally> tallies(kCheckCount);
  for (std::size_t i = 0; i < kCheckCount; ++i) tallies[i].name = kCheckNames[i];
  return tallies;
}

void record(CheckTally& tally, bool applicable, double excess, double slack) {
  ++tally.evaluated;
  if (!applicable) return;
  ++tally.applicable;
  tally.max_slack = std::max(tally.max_slack, excess);
  if (excess > slack) ++tally.violations;
}

// Dirichlet(1) masses, optionally with some coordinates zeroed out.
std::vector<double> random_masses(Rng& rng, std::size_t size, double sparsify_prob) {
  std::vector<double> m(size);
  for (auto& v : m) v = rng.exponential();
  if (rng.bernoulli(sparsify_prob)) {
    const std::size_t keep = rng.uniform_index(size);
    for (std::size_t i = 0; i < size; ++i) {
      if (i != keep && rng.bernoulli(0.3)) m[i] = 0.0;
    }
  }
  double total = 0.0;
  for (double v : m) total += v;
  for (auto& v : m) v /= total;
  return m;
}

MarkovKernel random_kernel(Rng& rng, std::size_t inputs, std::size_t max_outputs) {
  const std::size_t outputs = 1 + rng.uniform_index(max_outputs);
  std::vector<DiscreteDistribution> rows;
  rows.reserve(inputs);
  for (std::size_t x = 0; x < inputs; ++x) {
    if (rng.bernoulli(0.3)) {
      rows.push_back(DiscreteDistribution::point_mass(outputs, rng.uniform_index(outputs)));
    } else {
      rows.emplace_back(random_masses(rng, outputs, 0.0));
    }
  }
  return MarkovKernel(std::move(rows));
}

double dpi_excess(const DpiComparison& c) {
  if (c.original.is_infinite()) return -std::numeric_limits<double>::infinity();
  if (std::isfinite(c.pushed.value()) && std::isfinite(c.original.value())) {
    return c.pushed.value() - c.original.value();
  }
  return c.pushed.log_value() - c.original.log_value();
}

void run_trial(const LemmaVerificationOptions& opt, std::size_t trial,
               std::vector<CheckTally>& tallies) {
  Rng rng = Rng::derive(opt.seed, "verify_lemmas", {trial});
  const std::size_t size = 2 + rng.uniform_index(opt.max_support - 1);
  const DiscreteDistribution p(random_masses(rng, size, 0.25));
  const DiscreteDistribution q = opt.force_equal ? p : DiscreteDistribution(random_masses(rng, size, 0.1));

  std::vector<bool> membership(size);
  for (std::size_t i = 0; i < size; ++i) membership[i] = rng.bernoulli(0.5);
  const EventMask event(std::move(membership));
  const double p_event = event.probability(p);
  const double q_event = event.probability(q);

  const double alpha = opt.orders[rng.uniform_index(opt.orders.size())];
  const double order = opt.orders[rng.uniform_index(opt.orders.size())];

  const auto d_alpha = renyi_divergence(p, q, alpha);
  const auto h_p = hellinger_p_divergence(p, q, order);
  const auto chi2 = chi_squared_divergence(p, q);

  if (d_alpha.is_finite()) {
    const double bound = renyi_com_bound(q_event, d_alpha, alpha).p_event_bound + opt.bound_offset;
    record(tallies[kLemmaRenyi], true, p_event - bound, opt.slack);
  } else {
    record(tallies[kLemmaRenyi], false, 0.0, opt.slack);
  }

  if (h_p.is_finite()) {
    const auto res = hellinger_com_bound(q_event, h_p, order);
    const bool applicable = res.applicable && p_event < 0.5;
    record(tallies[kLemmaHellinger], applicable, p_event - (res.p_event_bound + opt.bound_offset),
           opt.slack);
  } else {
    record(tallies[kLemmaHellinger], false, 0.0, opt.slack);
  }

  if (chi2.is_finite()) {
    const double bound = chi2_com_bound(q_event, chi2).p_event_bound + opt.bound_offset;
    record(tallies[kLemmaChi2], true, p_event - bound, opt.slack);
  } else {
    record(tallies[kLemmaChi2], false, 0.0, opt.slack);
  }

  const MarkovKernel kernel = random_kernel(rng, size, opt.max_support);
  const DivergenceSpec specs[] = {DivergenceSpec::renyi(alpha), DivergenceSpec::chi_squared(),
                                  DivergenceSpec::hellinger(order), DivergenceSpec::kl()};
  const Check checks[] = {kDpiRenyi, kDpiChi2, kDpiHellinger, kDpiKl};
  for (std::size_t i = 0; i < 4; ++i) {
    record(tallies[checks[i]], true, dpi_excess(dpi_check(kernel, p, q, specs[i])), opt.slack);
  }
}

}  // namespace

ComBoundResult renyi_com_bound(Prob q_event, const DivergenceValue& d_alpha, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("Renyi order must exceed 1");
  require_finite(d_alpha, "Renyi divergence");
  const double exponent = (alpha - 1.0) / alpha;
  return {std::exp(exponent * (std::log(q_event.value()) + d_alpha.value())), true, {}};
}

ComBoundResult hellinger_com_bound(Prob q_event, const DivergenceValue& h_p, double order) {
  if (!(order > 1.0)) throw std::invalid_argument("Hellinger order must exceed 1");
  require_finite(h_p, "Hellinger divergence");
  // ln[1 + Q(E)^(1-p)] and ln[(p-1) H + 1], both as softplus.
  const double log_prior_term = softplus((1.0 - order) * std::log(q_event.value()));
  const double log_divergence_term = softplus(std::log(order - 1.0) + h_p.log_value());
  ComBoundResult res;
  res.p_event_bound = std::exp((log_divergence_term - log_prior_term) / order);
  if (q_event >= 0.5) {
    res.applicable = false;
    res.precondition_note = "requires Q(E) < 1/2; bound not valid for this event";
  } else {
    res.precondition_note = "valid only if P(E) < 1/2 as well; not checkable from these inputs";
  }
  return res;
}

ComBoundResult chi2_com_bound(Prob q_event, const DivergenceValue& chi2) {
  require_finite(chi2, "chi-squared divergence");
  return {std::sqrt(q_event * (chi2.value() + 2.0)), true, {}};
}

LemmaReport verify_lemmas(const LemmaVerificationOptions& options) {
  if (options.max_support < 2) throw std::invalid_argument("max_support must be at least 2");
  if (options.orders.empty()) throw std::invalid_argument("need at least one order");
  for (double o : options.orders) {
    if (!(o > 1.0)) throw std::invalid_argument("orders must exceed 1");
  }

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(options.trials, 1));
  std::vector<std::vector<CheckTally>> partial(workers, empty_tallies());
  auto work = [&](std::size_t part) {
    const std::size_t begin = options.trials * part / workers;
    const std::size_t end = options.trials * (part + 1) / workers;
    for (std::size_t t = begin; t < end; ++t) run_trial(options, t, partial[part]);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t part = 0; part < workers; ++part) threads.emplace_back(work, part);
  }

  LemmaReport report;
  report.trials = options.trials;
  report.seed = options.seed;
  report.checks = empty_tallies();
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < kCheckCount; ++i) {
      auto& into = report.checks[i];
      into.evaluated += part[i].evaluated;
      into.applicable += part[i].applicable;
      into.violations += part[i].violations;
      into.max_slack = std::max(into.max_slack, part[i].max_slack);
    }
  }
  for (const auto& c : report.checks) {
    report.applicable += c.applicable;
    report.violations += c.violations;
    report.max_slack_observed = std::max(report.max_slack_observed, c.max_slack);
  }
  return report;
}

nlohmann::json to_json(const LemmaReport& report) {
  auto slack_json = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"evaluated", c.evaluated},
                      {"applicable", c.applicable},
                      {"violations", c.violations},
                      {"max_slack", slack_json(c.max_slack)}});
  }
  return {{"trials", report.trials},
          {"applicable", report.applicable},
          {"violations", report.violations},
          {"max_slack_observed", slack_json(report.max_slack_observed)},
          {"seed", report.seed},
          {"checks", checks}};
}

}  // namespace dpipac
