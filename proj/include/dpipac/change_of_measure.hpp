#pragma once

// Change-of-measure upper bounds on P(E) given Q(E) and a divergence
// between P and Q, plus a randomized exhaustive-evaluation verifier.
//
//   Renyi:      P(E) <= Q(E)^((a-1)/a) * exp(((a-1)/a) * D_a(P||Q))
//   Hellinger:  P(E) <= [1 + Q(E)^(1-p)]^(-1/p) * [(p-1) H^p(P||Q) + 1]^(1/p)
//               valid only when P(E) < 1/2 and Q(E) < 1/2
//   Chi^2:      P(E) <= sqrt(Q(E) * (chi^2(P||Q) + 2))

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dpipac/divergence.hpp"
#include "json.hpp"

namespace dpipac {

class EventMask {
 public:
  explicit EventMask(std::vector<bool> membership) : membership_(std::move(membership)) {}

  std::size_t size() const { return membership_.size(); }
  bool contains(std::size_t i) const { return membership_[i]; }
  const std::vector<bool>& membership() const { return membership_; }

  /// Throws std::invalid_argument on a length mismatch.
  double probability(const DiscreteDistribution& dist) const {
    return dist.event_mass(membership_);
  }

 private:
  std::vector<bool> membership_;
};

struct ComBoundResult {
  double p_event_bound = 0.0;
  bool applicable = true;
  std::string precondition_note;
};

/// Throws std::invalid_argument for alpha <= 1 or an infinite divergence.
ComBoundResult renyi_com_bound(Prob q_event, const DivergenceValue& d_alpha, double alpha);

/// `applicable` is false when q_event >= 1/2. The P(E) < 1/2 half of the
/// precondition cannot be checked from these inputs and is left to the
/// caller; the note says so.
ComBoundResult hellinger_com_bound(Prob q_event, const DivergenceValue& h_p, double order);

ComBoundResult chi2_com_bound(Prob q_event, const DivergenceValue& chi2);

struct LemmaVerificationOptions {
  std::size_t trials = 10000;
  std::size_t max_support = 6;
  std::uint64_t seed = 1;
  std::vector<double> orders = {1.5, 2.0, 5.0, 10.0, 100.0};
  std::size_t workers = 1;
  /// Draw Q identical to P in every trial.
  bool force_equal = false;
  /// Test hook: added to every lemma bound before comparison. A negative
  /// value must surface as violations.
  double bound_offset = 0.0;
  double slack = 1e-12;
};

struct CheckTally {
  std::string name;
  std::size_t evaluated = 0;
  std::size_t applicable = 0;
  std::size_t violations = 0;
  /// Largest observed lhs - rhs; nonpositive when the inequality held
  /// everywhere. -inf when nothing was applicable.
  double max_slack = -std::numeric_limits<double>::infinity();
};

struct LemmaReport {
  std::size_t trials = 0;
  std::size_t applicable = 0;
  std::size_t violations = 0;
  double max_slack_observed = -std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  std::vector<CheckTally> checks;  // fixed order, see verify_lemmas
};

/// Samples random (P, Q, E, kernel) instances on supports of size
/// 2..max_support and checks the three change-of-measure bounds against the
/// exact P(E), plus data-processing for Renyi, chi^2, Hellinger and KL
/// under a random kernel. Results do not depend on `workers`.
///
/// Check order: lemma1_renyi, lemma2_hellinger, lemma3_chi_squared,
/// dpi_renyi, dpi_chi_squared, dpi_hellinger, dpi_kl.
LemmaReport verify_lemmas(const LemmaVerificationOptions& options);

nlohmann::json to_json(const LemmaReport& report);

}  // namespace dpipac
