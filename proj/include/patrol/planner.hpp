#pragma once

#include <cstdint>
#include <vector>

#include "patrol/detection.hpp"
#include "patrol/parallel.hpp"
#include "patrol/rng.hpp"

namespace patrol {

/// A sensor's T-step motion plan.  path[k] is the cell occupied at
/// look-ahead k+1; successive cells (starting from `start`) are always
/// nine-connected.
struct MotionPlan {
  int sensor_id = -1;
  CellIndex start;
  std::vector<CellIndex> path;
  std::vector<double> node_values;  // value collected at each path step
  double objective = 0.0;           // sum of node_values
};

/// Planning order for one coordination round: sensor ids sorted by
/// unconstrained objective, best first.  Ties are broken uniformly at
/// random; tie_ranges records each shuffled [begin, end) run for
/// diagnostics.
struct PriorityOrder {
  std::vector<int> order;
  std::vector<std::pair<int, int>> tie_ranges;
};

/// One coordination round entry for the plan trace log.
struct PlanTraceEntry {
  int sensor_id = -1;
  int priority = -1;  // 0 is highest
  std::vector<CellIndex> path;
  double objective_unconstrained = 0.0;
  double objective_final = 0.0;
};

/// Depth-limited search over the nine-connected space-time tree rooted at
/// `start`: returns a value-maximal horizon-step path.  Among equal-value
/// optima the move sequence that is lexicographically smallest in the
/// canonical neighbour order (stay, N, NE, E, SE, S, SW, W, NW) wins, so
/// the result is deterministic.  Throws std::runtime_error when the domain
/// is empty.
MotionPlan best_path(const ValueLattice& values, CellIndex start,
                     int horizon);

PriorityOrder prioritize(const std::vector<MotionPlan>& plans, Rng& rng);

/// Scales every node value by prod(1 - overlap) against the already-fixed
/// higher-priority plans at the same look-ahead.  Never increases a value.
ValueLattice apply_overlap_penalty(ValueLattice values,
                                   const std::vector<MotionPlan>& higher,
                                   const LatticeSpec& lattice);

/// Priority sweep over per-sensor value lattices: plan all sensors
/// unconstrained, order them, then replan each against the plans already
/// fixed above it.  The highest-priority sensor keeps its unconstrained
/// plan.  Returns plans indexed by sensor id.
std::vector<MotionPlan> coordinate_plans(
    const std::vector<ValueLattice>& lattices,
    const std::vector<CellIndex>& starts, int horizon, const LatticeSpec& lattice,
    Rng& rng, std::vector<PlanTraceEntry>* trace = nullptr);

/// Full coordination round: builds every sensor's value lattice from its
/// observations (the data-parallel fan-out) and runs the priority sweep.
std::vector<MotionPlan> coordinate_round(
    const std::vector<CellIndex>& sensor_cells,
    const std::vector<std::vector<TargetObservation>>& observations,
    const StatsTable& stats, int horizon, Rng& rng,
    Exec exec = Exec::parallel, std::vector<PlanTraceEntry>* trace = nullptr);

/// Independent (uncoordinated) planning for every sensor; same fan-out, no
/// penalties, no randomness.
std::vector<MotionPlan> independent_plans(
    const std::vector<CellIndex>& sensor_cells,
    const std::vector<std::vector<TargetObservation>>& observations,
    const StatsTable& stats, int horizon, Exec exec = Exec::parallel);

}  // namespace patrol
