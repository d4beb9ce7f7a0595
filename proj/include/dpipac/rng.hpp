#pragma once

// Seeded random streams. Every stream is derived from one master seed plus
// a purpose tag and an index path, so adding trials or hypotheses never
// perturbs any other stream. Variate generation is implemented here rather
// than via <random> distributions, whose output is library-specific.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <string_view>

namespace dpipac {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng derive(std::uint64_t master_seed, std::string_view tag,
                    std::initializer_list<std::uint64_t> path = {});

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  /// Standard normal (Marsaglia polar method).
  double normal();
  double exponential();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace dpipac
