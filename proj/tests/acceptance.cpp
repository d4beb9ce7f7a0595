// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dpipac/bounds.hpp"
#include "dpipac/change_of_measure.hpp"
#include "dpipac/cli.hpp"
#include "dpipac/divergence.hpp"
#include "dpipac/experiment.hpp"
#include "generators.hpp"

namespace {

using namespace dpipac;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail.clear();
  o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += why;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit_s > 0 && secs >= time_limit_s) {
    fail(o, fmt("runtime %.2fs exceeds %.0fs", secs, time_limit_s));
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %-36s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs,
              o.detail.c_str());
  std::fflush(stdout);
}

constexpr double kQ = 1.0 / 50.0;

Outcome lemma_soundness() {
  LemmaVerificationOptions opt;
  opt.trials = 10000;
  opt.max_support = 6;
  opt.seed = 1;
  const auto report = verify_lemmas(opt);
  Outcome o;
  std::size_t applicable = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = report.checks[i];
    applicable += c.applicable;
    if (c.violations != 0) fail(o, c.name + " violated " + std::to_string(c.violations) + " times");
  }
  if (o.pass) {
    o.detail = std::to_string(applicable) + " applicable lemma cases, max excess " +
               fmt("%.3g", report.max_slack_observed);
  }
  return o;
}

Outcome dpi_property() {
  testing::Gen gen(2024);
  const DivergenceSpec specs[] = {
      DivergenceSpec::renyi(1.5),     DivergenceSpec::renyi(2.0),     DivergenceSpec::renyi(10.0),
      DivergenceSpec::chi_squared(),  DivergenceSpec::hellinger(1.5), DivergenceSpec::hellinger(2.0),
      DivergenceSpec::hellinger(10.0), DivergenceSpec::kl()};
  Outcome o;
  std::size_t checks = 0, violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t in = gen.index(2, 6);
    const auto k = gen.kernel(in, gen.index(1, 6));
    const auto p = gen.distribution(in, 0.2);
    const auto q = gen.distribution(in, 0.1);
    for (const auto& s : specs) {
      ++checks;
      if (!dpi_check(k, p, q, s).holds(1e-12)) ++violations;
    }
  }
  if (violations) fail(o, std::to_string(violations) + " DPI violations");
  else o.detail = std::to_string(checks) + " comparisons";
  return o;
}

Outcome identities() {
  testing::Gen gen(77);
  double worst_d2 = 0, worst_h2 = 0, worst_hp = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = gen.index(2, 6);
    const auto p = gen.distribution(k, 0.2);
    const auto q = gen.positive_distribution(k);
    const double chi2 = chi_squared_divergence(p, q).value();
    worst_d2 = std::max(worst_d2, std::abs(renyi_divergence(p, q, 2.0).value() - std::log1p(chi2)));
    worst_h2 = std::max(worst_h2, std::abs(hellinger_p_divergence(p, q, 2.0).value() - chi2));
    for (double a : {1.5, 3.0}) {
      const double lhs = (a - 1) * hellinger_p_divergence(p, q, a).value() + 1;
      const double rhs = std::exp((a - 1) * renyi_divergence(p, q, a).value());
      worst_hp = std::max(worst_hp, std::abs(lhs - rhs) / rhs);
    }
  }
  Outcome o;
  if (worst_d2 > 1e-10) fail(o, fmt("D2 identity off by %.3g", worst_d2));
  if (worst_h2 > 1e-10) fail(o, fmt("H2 identity off by %.3g", worst_h2));
  if (worst_hp > 1e-10) fail(o, fmt("Hp identity off by %.3g relative", worst_hp));
  if (o.pass) o.detail = fmt("max errors %.2g, %.2g, %.2g (rel)", worst_d2, worst_h2, worst_hp);
  return o;
}

Outcome kl_inversion() {
  // 40 x 25 grid: p_hat evenly on [0, 0.99], c log-spaced on [1e-6, 5].
  constexpr int kP = 40, kC = 25;
  std::vector<double> ps(kP), cs(kC);
  for (int i = 0; i < kP; ++i) ps[i] = 0.99 * i / (kP - 1);
  for (int j = 0; j < kC; ++j) cs[j] = 1e-6 * std::pow(5.0 / 1e-6, static_cast<double>(j) / (kC - 1));

  std::vector<std::vector<double>> q(kP, std::vector<double>(kC));
  int round_trip_misses = 0, best_double = 0;
  double worst = 0;
  for (int i = 0; i < kP; ++i) {
    for (int j = 0; j < kC; ++j) {
      q[i][j] = kl_inverse_upper(ps[i], cs[j]);
      const double err = std::abs(binary_kl(ps[i], q[i][j]) - cs[j]);
      if (err > 1e-10) {
        ++round_trip_misses;
        worst = std::max(worst, err);
        // Is q* at least the best double available?
        const double up = std::nextafter(q[i][j], 2.0);
        if (binary_kl(ps[i], q[i][j]) <= cs[j] && (up >= 1.0 || binary_kl(ps[i], up) > cs[j])) {
          ++best_double;
        }
      }
    }
  }
  int monotone_breaks = 0;
  for (int i = 0; i < kP; ++i) {
    for (int j = 0; j < kC; ++j) {
      if (i > 0 && q[i][j] < q[i - 1][j]) ++monotone_breaks;
      if (j > 0 && q[i][j] < q[i][j - 1]) ++monotone_breaks;
    }
  }
  double closed_form = 0;
  for (double c : cs) closed_form = std::max(closed_form, std::abs(kl_inverse_upper(0.0, c) - (-std::expm1(-c))));

  Outcome o;
  if (round_trip_misses) {
    fail(o, std::to_string(round_trip_misses) + "/1000 points miss the 1e-10 round trip (worst " +
                fmt("%.3g", worst) + "); " + std::to_string(best_double) +
                " of them already return the largest double with KL <= c, so the target KL is "
                "not reachable in double precision");
  }
  if (monotone_breaks) fail(o, std::to_string(monotone_breaks) + " monotonicity breaks");
  if (closed_form > 1e-12) fail(o, fmt("p_hat = 0 closed form off by %.3g", closed_form));
  if (o.pass) o.detail = "1000 points";
  return o;
}

Outcome limit_convergence() {
  Outcome o;
  const double occam = rhs_occams_razor(100, 0.025, kQ);
  const double d = std::abs(rhs_d_alpha(100, 0.025, kQ, 1e9) - occam) / occam;
  const double h = std::abs(rhs_hellinger_p(100, 0.025, kQ, 1e9) - occam) / occam;
  if (d > 1e-6) fail(o, fmt("d_alpha relative gap %.3g", d));
  if (h > 1e-6) fail(o, fmt("hellinger_p relative gap %.3g", h));
  double prev = std::numeric_limits<double>::infinity();
  for (double a : {1.5, 2.0, 10.0, 1e3, 1e7, 1e9}) {
    const double cur = rhs_d_alpha(100, 0.025, kQ, a);
    if (!(cur < prev)) fail(o, fmt("d_alpha not strictly decreasing at alpha=%g", a));
    prev = cur;
  }
  if (o.pass) o.detail = fmt("relative gaps %.2g, %.2g", d, h);
  return o;
}

Outcome exact_values() {
  // 50-digit mpmath evaluations
  struct Case {
    const char* name;
    double got;
    double oracle;
  } cases[] = {
      {"test_set", rhs_test_set(100, 0.025), 0.036888794541139363},
      {"occams_razor", rhs_occams_razor(100, 0.025, kQ), 0.076009024595420824},
      {"d_alpha(10)", rhs_d_alpha(100, 0.025, kQ, 10.0), 0.080107779544436308},
      {"pac_bayes_point_mass", rhs_pac_bayes_point_mass(100, 0.025, kQ), 0.10596634733096073},
      {"chi_squared", rhs_chi_squared(100, 0.025, kQ), 0.11309584540952198},
  };
  Outcome o;
  double worst = 0;
  for (const auto& c : cases) {
    const double err = std::abs(c.got - c.oracle);
    worst = std::max(worst, err);
    if (err > 1e-9) fail(o, std::string(c.name) + fmt(" off by %.3g", err));
  }
  const double gap = std::abs(rhs_hellinger_p(100, 0.025, kQ, 10.0) - rhs_d_alpha(100, 0.025, kQ, 10.0));
  if (gap > 1e-15) fail(o, fmt("hellinger_p(10) differs from d_alpha(10) by %.3g", gap));
  if (o.pass) o.detail = fmt("max error %.2g, hellinger/d_alpha gap %.2g", worst, gap);
  return o;
}

Outcome figure1() {
  Outcome o;
  double worst = 0;
  for (std::size_t n : {100u, 200u, 400u, 800u, 1600u}) {
    const double occam = rhs_occams_razor(n, 0.025, kQ);
    const double hell = rhs_hellinger_p(n, 0.025, kQ, 1e7);
    const double dalpha = rhs_d_alpha(n, 0.025, kQ, 1e7);
    const double pb = rhs_pac_bayes_point_mass(n, 0.025, kQ);
    if (!(occam <= hell && hell <= dalpha && dalpha <= pb)) {
      fail(o, "ordering broken at n=" + std::to_string(n));
    }
    const double nd = static_cast<double>(n);
    const double err = std::abs((pb - occam) - std::log(2 * std::sqrt(nd)) / nd);
    worst = std::max(worst, err);
    if (err > 1e-12) fail(o, "extra term off at n=" + std::to_string(n) + fmt(" by %.3g", err));
  }
  if (o.pass) o.detail = fmt("extra-term max error %.2g", worst);
  return o;
}

Outcome coverage() {
  ExperimentConfig c;
  c.n_values = {100};
  c.trials = 2000;
  c.seed = 1;
  c.orders = {10.0};
  const double limit = 0.025 + 3 * std::sqrt(0.025 * 0.975 / 2000);
  Outcome o;
  std::string freqs;
  for (const auto& row : coverage_estimate(c)) {
    const Method m = row.bound.method;
    if (m != Method::kDAlpha && m != Method::kHellingerP && m != Method::kChiSquared) continue;
    freqs += std::string(method_name(m)) + "=" + fmt("%.4f", row.frequency) + " ";
    if (row.frequency > limit) fail(o, std::string(method_name(m)) + fmt(" frequency %.4f", row.frequency));
  }
  if (o.pass) o.detail = freqs + fmt("(limit %.4f)", limit);
  return o;
}

Outcome robustness() {
  namespace mp = boost::multiprecision;
  using Big = mp::number<mp::cpp_bin_float<200>>;
  Outcome o;
  const double big = 1e7, tiny = 1e-9;
  const double rhs[] = {rhs_test_set(1, tiny),
                        rhs_occams_razor(1, tiny, tiny),
                        rhs_pac_bayes_point_mass(1, tiny, tiny),
                        rhs_d_alpha(1, tiny, tiny, big),
                        rhs_hellinger_p(1, tiny, tiny, big),
                        rhs_chi_squared(1, tiny, tiny),
                        rhs_limit_or(1, tiny, tiny),
                        rhs_chi_squared_corollary(1, tiny, tiny)};
  for (double v : rhs) {
    if (!std::isfinite(v)) fail(o, "non-finite right-hand side");
  }
  testing::Gen gen(9);
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = gen.index(2, 6);
    auto p = gen.positive_distribution(k);
    std::vector<double> qm(k, (1.0 - tiny) / static_cast<double>(k - 1));
    qm[gen.index(0, k - 1)] = tiny;
    double s = 0;
    for (double x : qm) s += x;
    for (auto& x : qm) x /= s;
    const DiscreteDistribution q(qm);
    for (const auto& d : {renyi_divergence(p, q, big), hellinger_p_divergence(p, q, big),
                          chi_squared_divergence(p, q)}) {
      if (!d.is_finite() || std::isnan(d.log_value())) fail(o, "non-finite divergence");
    }
  }

  // Hellinger right-hand side against ln(q^(1-p) delta^(-p) - 1) / ((p-1) n)
  // formed directly at 200 bits.
  const double orders[] = {1.5, 2.0, 10.0, 1e3, 1e7};
  const std::pair<double, double> pairs[] = {{0.025, 0.02}, {1e-9, 1e-9}, {0.5, 0.5},
                                             {0.3, 0.9},    {0.1, 1.0},   {0.01, 0.5},
                                             {1e-4, 1e-3},  {0.45, 0.2},  {0.2, 0.05},
                                             {1e-6, 1.0}};
  const std::size_t n = 100;
  double worst = 0;
  for (double p : orders) {
    for (const auto& [delta, q] : pairs) {
      const Big bp(p), bd(delta), bq(q);
      const Big x = mp::pow(bq, 1 - bp) * mp::pow(bd, -bp);
      const Big ref = mp::log(x - 1) / ((bp - 1) * n);
      const double got = rhs_hellinger_p(n, delta, q, p);
      const double rel = static_cast<double>(mp::abs((Big(got) - ref) / ref));
      worst = std::max(worst, rel);
      if (!(rel <= 1e-12)) {
        fail(o, fmt("p=%g delta=%g q=%g", p, delta, q) + fmt(" rel error %.3g", rel));
      }
    }
  }
  if (o.pass) o.detail = fmt("50-point max relative error %.2g", worst);
  return o;
}

std::string capture(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, {out, err});
  if (code != 0) throw std::runtime_error("command failed: " + err.str());
  return out.str();
}

Outcome determinism() {
  Outcome o;
  const std::vector<std::string> sim = {"--seed", "5", "--trials", "300", "--mc-samples", "100000"};
  auto with = [&](std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  if (capture({"compare"}) != capture({"compare"})) fail(o, "compare differs between runs");
  for (const char* cmd : {"coverage", "experiment"}) {
    const auto serial = capture(with({cmd, "--workers", "1"}, sim));
    const auto again = capture(with({cmd, "--workers", "1"}, sim));
    const auto parallel = capture(with({cmd, "--workers", "4"}, sim));
    if (serial != again) fail(o, std::string(cmd) + " differs between runs");
    if (serial != parallel) fail(o, std::string(cmd) + " differs between serial and parallel");
  }
  if (o.pass) o.detail = "compare, coverage, experiment byte-identical";
  return o;
}

}  // namespace

int main() {
  criterion(1, "lemma soundness", 10, lemma_soundness);
  criterion(2, "data processing inequality", 10, dpi_property);
  criterion(3, "cross-divergence identities", 0, identities);
  criterion(4, "KL inversion", 0, kl_inversion);
  criterion(5, "limit to Occam's razor", 0, limit_convergence);
  criterion(6, "exact reference values", 0, exact_values);
  criterion(7, "figure-1 desk reproduction", 1, figure1);
  criterion(8, "coverage Monte Carlo", 60, coverage);
  criterion(9, "numerical robustness", 0, robustness);
  criterion(10, "determinism", 0, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
