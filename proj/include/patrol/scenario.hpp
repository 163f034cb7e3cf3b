#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "patrol/geometry.hpp"
#include "patrol/lattice_stats.hpp"
#include "patrol/strategy.hpp"

namespace patrol {

/// Fully resolved experiment description.  Sensor cells are concrete here:
/// when the config gives only a count, placement on an even grid over the
/// admissible box happens at parse time.
struct ScenarioConfig {
  ZoneSpec zone;
  LatticeSpec lattice;
  double lambda = 0.3;  // default per-source rate, targets per time-step
  std::vector<SourceSpec> sources;
  double target_speed = 10.0;
  std::vector<CellIndex> sensor_cells;
  int horizon = 3;
  int steps = 150;
  Strategy strategy = Strategy::t_step_coordinated;
  ReplanCadence replan = ReplanCadence::every_horizon;
  std::uint64_t seed = 1;
  StatsParams stats;

  friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);
};

/// Parses and validates a scenario file (JSON, // and /* */ comments
/// allowed).  Unknown keys, malformed values, and physically inconsistent
/// setups raise ConfigError naming the offending key.
ScenarioConfig parse_scenario(const std::filesystem::path& path);

/// Same, from an in-memory document.
ScenarioConfig parse_scenario_text(const std::string& text);

/// Canonical JSON for a resolved config; parse_scenario_text of the result
/// reproduces the config exactly.
std::string serialize_scenario(const ScenarioConfig& config);

std::uint64_t scenario_fingerprint(const ScenarioConfig& config);

}  // namespace patrol
