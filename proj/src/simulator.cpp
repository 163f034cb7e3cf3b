#include "patrol/simulator.hpp"

#include <algorithm>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "patrol/errors.hpp"
#include "patrol/hash.hpp"

namespace patrol {

namespace {

// Sub-stream tags for derive_seed; distinct consumers never share draws.
constexpr std::uint64_t kStreamSpawn = 1;
constexpr std::uint64_t kStreamPriority = 2;
constexpr std::uint64_t kStreamWalk = 3;

void checksum_event(Fnv1a& h, const SpawnEvent& e) {
  h.update_i32(e.step);
  h.update_i32(e.source);
  h.update_f64(e.angle);
  h.update_f64(e.speed);
}

}  // namespace

std::vector<SpawnEvent> draw_spawn_events(
    const std::vector<SourceSpec>& sources, double target_speed, int step,
    std::vector<Rng>& source_rngs) {
  std::vector<SpawnEvent> events;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    Rng& rng = source_rngs[j];
    const int count = rng.next_poisson(sources[j].rate);
    for (int k = 0; k < count; ++k) {
      SpawnEvent e;
      e.step = step;
      e.source = static_cast<std::int32_t>(j);
      e.angle = std::numbers::pi * rng.next_double();
      e.speed = target_speed;
      events.push_back(e);
    }
  }
  return events;
}

SpawnOutcome materialize_spawns(const std::vector<SpawnEvent>& events,
                                const std::vector<SourceSpec>& sources,
                                const Rect& zone, int step,
                                std::int64_t& next_id,
                                std::vector<TargetState>& targets) {
  SpawnOutcome out;
  for (const SpawnEvent& e : events) {
    if (e.step != step) continue;
    ++out.spawned;  // counts every draw; discards are a subset
    const SourceSpec& src = sources[static_cast<size_t>(e.source)];
    const Vec2 dir = ray_direction(src.facing, e.angle);
    if (!ray_hits_rect(src.position, dir, zone)) {
      ++out.discarded;
      continue;
    }
    TargetState t;
    t.id = next_id++;
    t.position = src.position;
    t.velocity = dir * e.speed;
    t.spawned_at = step;
    targets.push_back(t);
  }
  return out;
}

AdvanceOutcome advance_world(std::vector<TargetState>& targets,
                             const Rect& zone) {
  AdvanceOutcome out;
  for (TargetState& t : targets) {
    if (!t.active) continue;
    t.position = t.position + t.velocity;
    if (zone.contains(t.position)) {
      t.entered_zone = true;
    } else if (t.entered_zone) {
      t.active = false;
      ++out.deactivated;
    }
  }
  targets.erase(std::remove_if(targets.begin(), targets.end(),
                               [](const TargetState& t) { return !t.active; }),
                targets.end());
  return out;
}

DetectionMatrix detect(const std::vector<SensorState>& sensors,
                       const std::vector<TargetState>& targets,
                       const LatticeSpec& lattice) {
  std::vector<Rect> fovs;
  fovs.reserve(sensors.size());
  for (const SensorState& s : sensors)
    fovs.push_back(fov_square(s.cell, lattice));

  const Rect zone = lattice.zone_rect();
  DetectionMatrix dm;
  for (const TargetState& t : targets) {
    if (!t.active || !zone.contains(t.position)) continue;
    std::vector<std::uint8_t> row(sensors.size(), 0);
    int hits = 0;
    for (std::size_t s = 0; s < sensors.size(); ++s) {
      if (fovs[s].contains(t.position)) {
        row[s] = 1;
        ++hits;
      }
    }
    dm.target_ids.push_back(t.id);
    dm.g.push_back(std::move(row));
    dm.multiplicity.push_back(hits);
  }
  return dm;
}

namespace {

StepMetrics step_metrics(int step, const DetectionMatrix& dm) {
  StepMetrics m;
  m.step = step;
  m.in_zone = static_cast<int>(dm.target_ids.size());
  for (const int k : dm.multiplicity) {
    m.detection_pairs += k;
    if (k == 0) continue;
    ++m.detected_any;
    if (static_cast<int>(m.multiplicity_hist.size()) < k)
      m.multiplicity_hist.resize(static_cast<size_t>(k), 0);
    ++m.multiplicity_hist[static_cast<size_t>(k - 1)];
  }
  return m;
}

std::vector<TargetObservation> observe(const SensorState& sensor,
                                       const std::vector<TargetState>& targets,
                                       const LatticeSpec& lattice) {
  const Rect fov = fov_square(sensor.cell, lattice);
  const Rect zone = lattice.zone_rect();
  std::vector<TargetObservation> obs;
  for (const TargetState& t : targets) {
    if (!t.active || !zone.contains(t.position)) continue;
    if (fov.contains(t.position)) obs.push_back({t.position, t.velocity});
  }
  return obs;
}

void log_step(std::ostream& out, const StepMetrics& m,
              const std::vector<SensorState>& sensors) {
  nlohmann::json line;
  line["step"] = m.step;
  line["in_zone"] = m.in_zone;
  line["detected_any"] = m.detected_any;
  line["multiplicity"] = m.multiplicity_hist;
  nlohmann::json cells = nlohmann::json::array();
  for (const SensorState& s : sensors)
    cells.push_back({s.cell.col, s.cell.row});
  line["sensors"] = std::move(cells);
  out << line.dump() << '\n';
}

void log_plans(std::ostream& out, int step,
               const std::vector<PlanTraceEntry>& entries) {
  for (const PlanTraceEntry& e : entries) {
    nlohmann::json line;
    line["step"] = step;
    line["sensor"] = e.sensor_id;
    line["priority"] = e.priority;
    nlohmann::json path = nlohmann::json::array();
    for (const CellIndex c : e.path) path.push_back({c.col, c.row});
    line["path"] = std::move(path);
    line["objective_unconstrained"] = e.objective_unconstrained;
    line["objective_final"] = e.objective_final;
    out << line.dump() << '\n';
  }
}

}  // namespace

ExperimentSummary run_experiment(const ScenarioConfig& config,
                                 const StatsTable* stats,
                                 const RunOptions& options) {
  if (options.replay && options.record)
    throw std::invalid_argument(
        "run_experiment: record and replay are mutually exclusive");
  if (is_planning_strategy(config.strategy)) {
    if (!stats)
      throw ConfigError("run_experiment: planning strategy needs a stats table");
    if (stats->fingerprint() != scenario_fingerprint(config))
      throw ConfigError(
          "run_experiment: stats table fingerprint does not match the "
          "scenario");
  }

  const LatticeSpec& lat = config.lattice;
  const Rect zone = lat.zone_rect();

  std::vector<SensorState> sensors;
  sensors.reserve(config.sensor_cells.size());
  for (std::size_t i = 0; i < config.sensor_cells.size(); ++i)
    sensors.push_back(
        {static_cast<int>(i), config.sensor_cells[i], MotionPlan{}, 0});

  std::vector<Rng> source_rngs;
  source_rngs.reserve(config.sources.size());
  for (std::size_t j = 0; j < config.sources.size(); ++j)
    source_rngs.emplace_back(derive_seed(config.seed, kStreamSpawn, j));
  Rng priority_rng(derive_seed(config.seed, kStreamPriority));
  std::vector<Rng> walk_rngs;
  walk_rngs.reserve(sensors.size());
  for (std::size_t i = 0; i < sensors.size(); ++i)
    walk_rngs.emplace_back(derive_seed(config.seed, kStreamWalk, i));

  std::vector<TargetState> targets;
  std::int64_t next_id = 1;
  std::size_t replay_pos = 0;

  ExperimentSummary sum;
  sum.strategy = strategy_label(config.strategy);
  sum.seed = config.seed;
  sum.steps = config.steps;
  sum.n_sensors = static_cast<int>(sensors.size());
  sum.target_speed = config.target_speed;

  Fnv1a consumed;
  double total_detected = 0.0;
  double total_in_zone = 0.0;
  double total_d1 = 0.0, total_d2 = 0.0, total_d3 = 0.0;
  bool have_plans = false;

  for (int step = 1; step <= config.steps; ++step) {
    // 1. spawn
    std::vector<SpawnEvent> events;
    if (options.replay) {
      while (replay_pos < options.replay->size() &&
             (*options.replay)[replay_pos].step < step)
        ++replay_pos;
      while (replay_pos < options.replay->size() &&
             (*options.replay)[replay_pos].step == step)
        events.push_back((*options.replay)[replay_pos++]);
    } else {
      events = draw_spawn_events(config.sources, config.target_speed, step,
                                 source_rngs);
      if (options.record)
        options.record->insert(options.record->end(), events.begin(),
                               events.end());
    }
    for (const SpawnEvent& e : events) checksum_event(consumed, e);
    const SpawnOutcome spawned =
        materialize_spawns(events, config.sources, zone, step, next_id,
                           targets);
    sum.spawned += spawned.spawned;
    sum.discarded += spawned.discarded;

    // 2. advance
    sum.deactivated += advance_world(targets, zone).deactivated;

    // 3. sensors
    switch (config.strategy) {
      case Strategy::stationary:
        break;
      case Strategy::random_walk:
        for (SensorState& s : sensors) {
          const NeighborList nb = neighbors9(s.cell, lat);
          s.cell = nb[static_cast<int>(
              walk_rngs[static_cast<size_t>(s.id)].next_below(
                  static_cast<std::uint32_t>(nb.count)))];
        }
        break;
      case Strategy::t_step_coordinated:
      case Strategy::t_step_uncoordinated: {
        const bool replan = config.replan == ReplanCadence::every_step ||
                            (step - 1) % config.horizon == 0;
        if (replan) {
          std::vector<CellIndex> cells;
          std::vector<std::vector<TargetObservation>> obs;
          cells.reserve(sensors.size());
          obs.reserve(sensors.size());
          for (const SensorState& s : sensors) {
            cells.push_back(s.cell);
            obs.push_back(observe(s, targets, lat));
          }
          std::vector<PlanTraceEntry> trace;
          std::vector<MotionPlan> plans;
          if (config.strategy == Strategy::t_step_coordinated) {
            plans = coordinate_round(cells, obs, *stats, config.horizon,
                                     priority_rng, options.exec,
                                     options.plan_trace ? &trace : nullptr);
          } else {
            plans = independent_plans(cells, obs, *stats, config.horizon,
                                      options.exec);
            if (options.plan_trace)
              for (const MotionPlan& p : plans)
                trace.push_back({p.sensor_id, p.sensor_id, p.path,
                                 p.objective, p.objective});
          }
          for (SensorState& s : sensors) {
            s.plan = std::move(plans[static_cast<size_t>(s.id)]);
            s.cursor = 0;
          }
          have_plans = true;
          if (options.plan_trace) log_plans(*options.plan_trace, step, trace);
        }
        if (!have_plans)
          throw std::logic_error("run_experiment: moving without a plan");
        for (SensorState& s : sensors) {
          if (s.cursor >= static_cast<int>(s.plan.path.size()))
            throw std::logic_error(
                "run_experiment: plan exhausted before replan");
          s.cell = s.plan.path[static_cast<size_t>(s.cursor++)];
        }
        break;
      }
    }

    // 4. detect and accumulate
    const DetectionMatrix dm = detect(sensors, targets, lat);
    const StepMetrics m = step_metrics(step, dm);
    total_detected += m.detected_any;
    total_in_zone += m.in_zone;
    if (!m.multiplicity_hist.empty()) total_d1 += m.multiplicity_hist[0];
    if (m.multiplicity_hist.size() > 1) total_d2 += m.multiplicity_hist[1];
    if (m.multiplicity_hist.size() > 2) total_d3 += m.multiplicity_hist[2];
    if (options.step_log) log_step(*options.step_log, m, sensors);
  }

  sum.active_end = static_cast<std::int64_t>(targets.size());
  sum.spawn_checksum = consumed.value();
  sum.J = total_detected;
  const double steps = static_cast<double>(config.steps);
  sum.AD = total_detected / steps;
  sum.mean_in_zone = total_in_zone / steps;
  sum.ZD = sum.mean_in_zone - sum.AD;
  sum.AF = (sum.AD + sum.ZD) > 0.0 ? sum.AD / (sum.AD + sum.ZD) : 0.0;
  sum.D1S = total_d1 / steps;
  sum.D2S = total_d2 / steps;
  sum.D3S = total_d3 / steps;
  return sum;
}

}  // namespace patrol
