#include "patrol/planner.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace patrol {

MotionPlan best_path(const ValueLattice& values, CellIndex start,
                     int horizon) {
  if (start != values.planning_cell())
    throw std::domain_error("best_path: start differs from planning cell");
  if (horizon != values.horizon())
    throw std::domain_error("best_path: horizon differs from the lattice");

  // Stage-wise DP over the reachable domain.  W(c, t) is the best value
  // collectable from (c, t) onward; ties resolve to the canonical-first
  // neighbour during reconstruction, which makes the chosen move sequence
  // lexicographically smallest among the optima.
  ValueLattice to_go = values;
  for (int t = horizon - 1; t >= 1; --t) {
    // Layer t reads only the already-final layer t+1.
    values.for_each([&](CellIndex c, int tt, double v) {
      if (tt != t) return;
      double best = 0.0;
      bool found = false;
      for (const auto& off : kNeighborOffsets) {
        const CellIndex n{c.col + off[0], c.row + off[1]};
        if (!to_go.in_domain(n, t + 1)) continue;
        const double w = to_go.at(n, t + 1);
        if (!found || w > best) {
          best = w;
          found = true;
        }
      }
      // Every admissible cell keeps itself as a successor, so found holds
      // whenever the domain is consistent.
      to_go.set(c, t, found ? v + best : v);
    });
  }

  MotionPlan plan;
  plan.start = start;
  plan.path.reserve(static_cast<size_t>(horizon));
  plan.node_values.reserve(static_cast<size_t>(horizon));

  CellIndex current = start;
  for (int t = 1; t <= horizon; ++t) {
    bool found = false;
    CellIndex pick;
    double best = 0.0;
    for (const auto& off : kNeighborOffsets) {
      const CellIndex n{current.col + off[0], current.row + off[1]};
      if (!to_go.in_domain(n, t)) continue;
      const double w = to_go.at(n, t);
      if (!found || w > best) {
        best = w;
        pick = n;
        found = true;
      }
    }
    if (!found)
      throw std::runtime_error("best_path: empty planning domain");
    plan.path.push_back(pick);
    plan.node_values.push_back(values.at(pick, t));
    plan.objective += plan.node_values.back();
    current = pick;
  }
  return plan;
}

PriorityOrder prioritize(const std::vector<MotionPlan>& plans, Rng& rng) {
  const std::size_t n = plans.size();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&plans](int a, int b) {
    const MotionPlan& pa = plans[static_cast<size_t>(a)];
    const MotionPlan& pb = plans[static_cast<size_t>(b)];
    if (pa.objective != pb.objective) return pa.objective > pb.objective;
    return pa.sensor_id < pb.sensor_id;
  });

  PriorityOrder po;
  po.order.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    po.order[i] = plans[static_cast<size_t>(idx[i])].sensor_id;

  // Shuffle each run of exactly-equal objectives.
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n &&
           plans[static_cast<size_t>(idx[j])].objective ==
               plans[static_cast<size_t>(idx[i])].objective)
      ++j;
    if (j - i > 1) {
      rng.shuffle(po.order.data() + i, j - i);
      po.tie_ranges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
    i = j;
  }
  return po;
}

ValueLattice apply_overlap_penalty(ValueLattice values,
                                   const std::vector<MotionPlan>& higher,
                                   const LatticeSpec& lattice) {
  const int horizon = values.horizon();
  for (const MotionPlan& h : higher)
    if (static_cast<int>(h.path.size()) < horizon)
      throw std::invalid_argument(
          "apply_overlap_penalty: a higher-priority plan is shorter than "
          "the horizon");

  values.transform([&](CellIndex c, int t, double v) {
    for (const MotionPlan& h : higher)
      v *= 1.0 - overlap_fraction(c, h.path[static_cast<size_t>(t - 1)],
                                  lattice);
    return v;
  });
  return values;
}

std::vector<MotionPlan> coordinate_plans(
    const std::vector<ValueLattice>& lattices,
    const std::vector<CellIndex>& starts, int horizon,
    const LatticeSpec& lattice, Rng& rng,
    std::vector<PlanTraceEntry>* trace) {
  if (lattices.size() != starts.size())
    throw std::invalid_argument(
        "coordinate_plans: lattices and starts disagree in size");
  const std::size_t n = lattices.size();

  std::vector<MotionPlan> unconstrained(n);
  for (std::size_t i = 0; i < n; ++i) {
    unconstrained[i] = best_path(lattices[i], starts[i], horizon);
    unconstrained[i].sensor_id = static_cast<int>(i);
  }

  const PriorityOrder po = prioritize(unconstrained, rng);

  std::vector<MotionPlan> result(n);
  std::vector<MotionPlan> higher;
  higher.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    const int sid = po.order[p];
    MotionPlan plan;
    if (p == 0) {
      // The top sensor keeps its unconstrained optimum untouched.
      plan = unconstrained[static_cast<size_t>(sid)];
    } else {
      const ValueLattice penalized = apply_overlap_penalty(
          lattices[static_cast<size_t>(sid)], higher, lattice);
      plan = best_path(penalized, starts[static_cast<size_t>(sid)], horizon);
      plan.sensor_id = sid;
    }
    if (trace)
      trace->push_back({sid, static_cast<int>(p), plan.path,
                        unconstrained[static_cast<size_t>(sid)].objective,
                        plan.objective});
    higher.push_back(plan);
    result[static_cast<size_t>(sid)] = std::move(plan);
  }
  return result;
}

namespace {

std::vector<ValueLattice> build_all_lattices(
    const std::vector<CellIndex>& sensor_cells,
    const std::vector<std::vector<TargetObservation>>& observations,
    const StatsTable& stats, int horizon, Exec exec) {
  if (sensor_cells.size() != observations.size())
    throw std::invalid_argument(
        "planning round: sensors and observation lists disagree in size");
  for (const CellIndex c : sensor_cells)
    if (!stats.contains(c))
      throw std::domain_error("planning round: sensor cell not admissible");

  const std::int64_t n = static_cast<std::int64_t>(sensor_cells.size());
  std::vector<ValueLattice> lattices(static_cast<size_t>(n));
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i)
      lattices[static_cast<size_t>(i)] = build_value_lattice(
          sensor_cells[static_cast<size_t>(i)],
          observations[static_cast<size_t>(i)], horizon, stats);
  } else {
    for (std::int64_t i = 0; i < n; ++i)
      lattices[static_cast<size_t>(i)] = build_value_lattice(
          sensor_cells[static_cast<size_t>(i)],
          observations[static_cast<size_t>(i)], horizon, stats);
  }
  return lattices;
}

}  // namespace

std::vector<MotionPlan> coordinate_round(
    const std::vector<CellIndex>& sensor_cells,
    const std::vector<std::vector<TargetObservation>>& observations,
    const StatsTable& stats, int horizon, Rng& rng, Exec exec,
    std::vector<PlanTraceEntry>* trace) {
  const std::vector<ValueLattice> lattices =
      build_all_lattices(sensor_cells, observations, stats, horizon, exec);
  return coordinate_plans(lattices, sensor_cells, horizon, stats.lattice(),
                          rng, trace);
}

std::vector<MotionPlan> independent_plans(
    const std::vector<CellIndex>& sensor_cells,
    const std::vector<std::vector<TargetObservation>>& observations,
    const StatsTable& stats, int horizon, Exec exec) {
  const std::vector<ValueLattice> lattices =
      build_all_lattices(sensor_cells, observations, stats, horizon, exec);
  std::vector<MotionPlan> plans(lattices.size());
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    plans[i] = best_path(lattices[i], sensor_cells[i], horizon);
    plans[i].sensor_id = static_cast<int>(i);
  }
  return plans;
}

}  // namespace patrol
