#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "patrol/planner.hpp"
#include "patrol/scenario.hpp"
#include "patrol/spawn_stream.hpp"

namespace patrol {

struct TargetState {
  std::int64_t id = 0;
  Point position;
  Vec2 velocity;
  int spawned_at = 0;
  bool active = true;
  bool entered_zone = false;
};

struct SensorState {
  int id = 0;
  CellIndex cell;
  MotionPlan plan;
  int cursor = 0;  // next plan step to execute
};

/// Per-step detection outcome: one row per active in-zone target, one
/// column per sensor.
struct DetectionMatrix {
  std::vector<std::int64_t> target_ids;
  std::vector<std::vector<std::uint8_t>> g;  // g[m][s] = 1 when s sees m
  std::vector<int> multiplicity;             // row sums
};

DetectionMatrix detect(const std::vector<SensorState>& sensors,
                       const std::vector<TargetState>& targets,
                       const LatticeSpec& lattice);

struct StepMetrics {
  int step = 0;
  int in_zone = 0;
  int detected_any = 0;
  std::vector<int> multiplicity_hist;  // [k-1] = targets seen by exactly k
  int detection_pairs = 0;             // sum of per-target sensor counts
};

struct ExperimentSummary {
  std::string strategy;
  std::uint64_t seed = 0;
  int steps = 0;
  int n_sensors = 0;
  double target_speed = 0.0;
  double J = 0.0;   // total detections over the run
  double AD = 0.0;  // mean detected per step
  double ZD = 0.0;  // mean undetected in-zone per step
  double AF = 0.0;  // AD / (AD + ZD), 0 when the zone stayed empty
  double D1S = 0.0, D2S = 0.0, D3S = 0.0;  // mean multiplicity counts
  double mean_in_zone = 0.0;

  // conservation bookkeeping
  std::int64_t spawned = 0;
  std::int64_t discarded = 0;
  std::int64_t deactivated = 0;
  std::int64_t active_end = 0;

  std::uint64_t spawn_checksum = 0;  // over the consumed spawn events
};

/// Pre-discard spawn draws for one step, one Poisson batch per source.
/// Consumes per-source RNG streams; the zone-crossing discard happens later
/// so that recorded streams replay the bookkeeping exactly.
std::vector<SpawnEvent> draw_spawn_events(
    const std::vector<SourceSpec>& sources, double target_speed, int step,
    std::vector<Rng>& source_rngs);

/// Turns events into live targets; rays that never cross the zone are
/// dropped and counted.  spawned counts every draw, so conservation reads
/// spawned == discarded + deactivated + active.
struct SpawnOutcome {
  int spawned = 0;
  int discarded = 0;
};
SpawnOutcome materialize_spawns(const std::vector<SpawnEvent>& events,
                                const std::vector<SourceSpec>& sources,
                                const Rect& zone, int step,
                                std::int64_t& next_id,
                                std::vector<TargetState>& targets);

/// Straight-line motion; targets that leave the zone after having been
/// inside are deactivated and removed.
struct AdvanceOutcome {
  int deactivated = 0;
};
AdvanceOutcome advance_world(std::vector<TargetState>& targets,
                             const Rect& zone);

struct RunOptions {
  const std::vector<SpawnEvent>* replay = nullptr;  // exclusive with record
  std::vector<SpawnEvent>* record = nullptr;
  std::ostream* step_log = nullptr;    // JSONL, one line per step
  std::ostream* plan_trace = nullptr;  // JSONL, one line per planned sensor
  Exec exec = Exec::parallel;
};

/// Runs the full experiment described by the config.  `stats` is required
/// for the planning strategies and must fingerprint-match the scenario.
ExperimentSummary run_experiment(const ScenarioConfig& config,
                                 const StatsTable* stats,
                                 const RunOptions& options = {});

}  // namespace patrol
