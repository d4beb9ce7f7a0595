#pragma once

// Experiment configuration and prior files, both JSON.
//
// Config: a flat object whose keys are the ExperimentConfig fields
// (n_values, hypothesis_count, box_half_width, w_star, delta, seed, trials,
// population_mc_samples, orders, workers). Missing keys keep their defaults;
// unknown keys are rejected.
//
// Prior: either an object mapping hypothesis id to mass or an array of
// masses (ids "0", "1", ...). Masses must be positive and sum to 1.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpipac/experiment.hpp"
#include "json.hpp"

namespace dpipac {

/// Malformed or out-of-range configuration; the message names the field
/// (or line and column for syntax errors).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

struct PriorFile {
  std::vector<std::pair<std::string, double>> entries;

  double q_min() const;
  /// Throws ConfigError for an unknown id.
  double mass(std::string_view id) const;
};

PriorFile parse_prior(std::string_view text);
PriorFile load_prior(const std::filesystem::path& path);

}  // namespace dpipac
