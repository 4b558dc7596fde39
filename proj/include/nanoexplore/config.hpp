#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nanoexplore/harness.hpp"
#include "nanoexplore/metrics.hpp"

namespace nanoexplore {

inline constexpr int kSchemaVersion = 1;

// Bad config file, unknown key, or invalid value. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  RunConfig run;
  SweepSpec sweep;
  HeatmapStyle heatmap;
};

struct ConfigKey {
  std::string key;
  std::string default_value;
  std::string description;
};

// Every recognised dotted key with its default, for --help.
const std::vector<ConfigKey>& config_keys();

nlohmann::ordered_json default_config_json();

// Merges a user document over the defaults. Unknown keys are rejected.
void merge_config(nlohmann::ordered_json& base, const nlohmann::ordered_json& user);

// `dotted.key=value`; the value is parsed as JSON when possible, otherwise
// taken as a string.
void apply_override(nlohmann::ordered_json& doc, std::string_view assignment);

// Relative arena paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::ordered_json& doc, const std::string& base_dir = ".");

nlohmann::ordered_json load_config_file(const std::string& path);

}  // namespace nanoexplore
