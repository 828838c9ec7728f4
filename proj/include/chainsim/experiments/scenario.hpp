#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "chainsim/sim/config.hpp"

namespace chainsim::experiments {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::string name = "no-is";
  sim::SimConfig sim;
  int replications = 3;

  void validate() const;
};

/// Reads a scenario from JSON. Missing keys keep their defaults; unknown keys,
/// wrong types and invalid values throw ConfigError.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& config);
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Scenario names accepted on the command line.
enum class ScenarioKind { NoIS, BIS, Both, Distorted };
ScenarioKind parse_scenario_kind(std::string_view name);

enum class DistortionUse {
  AsConfigured,
  None,     // honest posting regardless of the file
  Applied,  // the file's map, or R1 at half its demand when the map is empty
};

/// Copy of `base` with the sharing mode, the name and the distortion map set.
ScenarioConfig make_scenario(const ScenarioConfig& base, sim::SharingMode mode,
                             DistortionUse distortion = DistortionUse::AsConfigured);

}  // namespace chainsim::experiments
