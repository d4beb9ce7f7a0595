#include "dpipac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dpipac {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() carries the line and column
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

[[noreturn]] void field_error(const std::string& key, const std::string& why) {
  throw ConfigError("field '" + key + "': " + why);
}

std::uint64_t as_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    field_error(key, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) field_error(key, "expected a number");
  return v.get<double>();
}

std::vector<double> as_reals(const json& v, const std::string& key) {
  if (!v.is_array()) field_error(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_real(e, key));
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "n_values") {
      if (!value.is_array()) field_error(key, "expected an array of sample counts");
      cfg.n_values.clear();
      for (const auto& e : value) cfg.n_values.push_back(as_count(e, key));
    } else if (key == "hypothesis_count") {
      cfg.hypothesis_count = as_count(value, key);
    } else if (key == "box_half_width") {
      cfg.box_half_width = as_real(value, key);
    } else if (key == "w_star") {
      const auto w = as_reals(value, key);
      if (w.size() != 2) field_error(key, "expected exactly two numbers");
      cfg.w_star = {w[0], w[1]};
    } else if (key == "delta") {
      cfg.delta = as_real(value, key);
    } else if (key == "seed") {
      cfg.seed = as_count(value, key);
    } else if (key == "trials") {
      cfg.trials = as_count(value, key);
    } else if (key == "population_mc_samples") {
      cfg.population_mc_samples = as_count(value, key);
    } else if (key == "orders") {
      cfg.orders = as_reals(value, key);
    } else if (key == "workers") {
      cfg.workers = as_count(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"n_values", c.n_values},
          {"hypothesis_count", c.hypothesis_count},
          {"box_half_width", c.box_half_width},
          {"w_star", c.w_star},
          {"delta", c.delta},
          {"seed", c.seed},
          {"trials", c.trials},
          {"population_mc_samples", c.population_mc_samples},
          {"orders", c.orders}};
}

double PriorFile::q_min() const {
  double m = 1.0;
  for (const auto& [id, mass] : entries) m = std::min(m, mass);
  return m;
}

double PriorFile::mass(std::string_view id) const {
  for (const auto& [key, mass] : entries) {
    if (key == id) return mass;
  }
  throw ConfigError("hypothesis '" + std::string(id) + "' not found in prior");
}

PriorFile parse_prior(std::string_view text) {
  const json doc = parse_json(text);
  PriorFile prior;
  if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) prior.entries.emplace_back(key, as_real(value, key));
  } else if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      prior.entries.emplace_back(std::to_string(i), as_real(doc[i], std::to_string(i)));
    }
  } else {
    throw ConfigError("prior must be a JSON object or array of masses");
  }
  if (prior.entries.empty()) throw ConfigError("prior has no entries");
  double total = 0.0;
  for (const auto& [id, mass] : prior.entries) {
    if (!(mass > 0.0) || !std::isfinite(mass)) field_error(id, "prior mass must be positive");
    total += mass;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("prior masses do not sum to 1");
  return prior;
}

PriorFile load_prior(const std::filesystem::path& path) { return parse_prior(read_file(path)); }

}  // namespace dpipac
