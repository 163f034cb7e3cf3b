// patrol: offline statistics, single experiments, and strategy comparisons
// for the lattice surveillance simulator.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patrol/errors.hpp"
#include "patrol/report.hpp"
#include "patrol/scenario.hpp"
#include "patrol/simulator.hpp"
#include "patrol/stats_cache.hpp"

namespace {

namespace fs = std::filesystem;
using namespace patrol;

struct CommonFlags {
  std::string scenario_path;
  std::string stats_cache;
  bool serial = false;

  Exec exec() const { return serial ? Exec::serial : Exec::parallel; }
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<int> steps;
  std::optional<int> horizon;
  std::optional<std::string> replan;

  void apply(ScenarioConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (strategy) cfg.strategy = parse_strategy(*strategy);
    if (steps) cfg.steps = *steps;
    if (horizon) cfg.horizon = *horizon;
    if (replan) cfg.replan = parse_cadence(*replan);
  }
};

enum class OnCacheMismatch { error, rebuild };

/// Loads the cache when it matches the scenario, otherwise builds the
/// table (and refreshes the cache file when a path is given).
StatsTable obtain_stats(const ScenarioConfig& cfg, const std::string& cache,
                        Exec exec, OnCacheMismatch on_mismatch,
                        bool* cache_hit = nullptr) {
  if (cache_hit) *cache_hit = false;
  const std::uint64_t fp = scenario_fingerprint(cfg);

  if (!cache.empty() && fs::exists(cache)) {
    StatsTable table = load_stats_cache(cache);
    if (table.fingerprint() == fp && table.params() == cfg.stats) {
      if (cache_hit) *cache_hit = true;
      return table;
    }
    if (on_mismatch == OnCacheMismatch::error)
      throw ConfigError("stats cache " + cache +
                        " does not match the scenario (fingerprint or "
                        "quadrature parameters differ); rerun precompute");
  }

  StatsTable table = precompute_all(cfg.lattice, cfg.sources,
                                    cfg.target_speed, cfg.stats, exec);
  if (!cache.empty()) save_stats_cache(cache, table);
  return table;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

int cmd_precompute(const CommonFlags& common) {
  const ScenarioConfig cfg = parse_scenario(common.scenario_path);
  std::string cache = common.stats_cache;
  if (cache.empty())
    cache = fs::path(common.scenario_path).replace_extension(".ptab").string();

  bool hit = false;
  const StatsTable table =
      obtain_stats(cfg, cache, common.exec(), OnCacheMismatch::rebuild, &hit);

  double dmin = 0.0, dmax = 0.0, dsum = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double d = table.stats_by_index(i).expected_detections;
    if (i == 0) dmin = dmax = d;
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
    dsum += d;
  }

  char buf[256];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(table.fingerprint()));
  std::cout << (hit ? "stats cache hit: " : "stats cache written: ") << cache
            << " (fingerprint " << buf << ", " << table.size() << " cells)\n";
  std::snprintf(buf, sizeof buf,
                "expected detections per cell: min %.6g mean %.6g max %.6g",
                dmin, table.size() ? dsum / table.size() : 0.0, dmax);
  std::cout << buf << "\n";
  return 0;
}

int cmd_run(const CommonFlags& common, const Overrides& overrides,
            const std::string& record_path, const std::string& replay_path,
            const std::string& out_path, const std::string& log_path,
            const std::string& trace_path) {
  ScenarioConfig cfg = parse_scenario(common.scenario_path);
  overrides.apply(cfg);

  std::optional<StatsTable> stats;
  if (is_planning_strategy(cfg.strategy))
    stats = obtain_stats(cfg, common.stats_cache, common.exec(),
                         OnCacheMismatch::error);

  RunOptions ro;
  ro.exec = common.exec();

  SpawnStream replay_stream;
  if (!replay_path.empty()) {
    replay_stream = load_spawn_stream(replay_path);
    if (replay_stream.scenario_fingerprint != scenario_fingerprint(cfg))
      throw ConfigError(
          "spawn stream " + replay_path +
          " was recorded for a different scenario (fingerprint mismatch)");
    ro.replay = &replay_stream.events;
  }
  std::vector<SpawnEvent> recorded;
  if (!record_path.empty()) ro.record = &recorded;

  std::ofstream log_file, trace_file;
  if (!log_path.empty()) {
    log_file = open_out(log_path);
    ro.step_log = &log_file;
  }
  if (!trace_path.empty()) {
    trace_file = open_out(trace_path);
    ro.plan_trace = &trace_file;
  }

  const ExperimentSummary sum =
      run_experiment(cfg, stats ? &*stats : nullptr, ro);

  if (!record_path.empty())
    save_spawn_stream(record_path, scenario_fingerprint(cfg), cfg.seed,
                      recorded);

  const std::vector<SummaryRow> rows = {summary_row(sum, sum.strategy)};
  if (out_path.empty()) {
    write_summary_csv(std::cout, rows);
  } else {
    std::ofstream out = open_out(out_path);
    write_summary_csv(out, rows);
  }

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "run: strategy=%s seed=%llu steps=%d horizon=%d\n"
                "mean in-zone population: %.6g\n"
                "targets: drawn %lld discarded %lld exited %lld active %lld",
                sum.strategy.c_str(),
                static_cast<unsigned long long>(sum.seed), sum.steps,
                cfg.horizon, sum.mean_in_zone,
                static_cast<long long>(sum.spawned),
                static_cast<long long>(sum.discarded),
                static_cast<long long>(sum.deactivated),
                static_cast<long long>(sum.active_end));
  std::cerr << buf << "\n";
  return 0;
}

int cmd_compare(const CommonFlags& common, const Overrides& overrides,
                const std::vector<std::string>& strategy_labels, int seeds,
                const std::string& out_path) {
  ScenarioConfig cfg = parse_scenario(common.scenario_path);
  overrides.apply(cfg);

  CompareOptions opts;
  opts.exec = common.exec();
  opts.n_seeds = seeds;
  opts.base_seed = overrides.seed ? *overrides.seed : cfg.seed;
  if (strategy_labels.empty()) {
    opts.strategies = {Strategy::t_step_coordinated,
                       Strategy::t_step_uncoordinated};
  } else {
    for (const std::string& label : strategy_labels)
      opts.strategies.push_back(parse_strategy(label));
  }

  const StatsTable stats = obtain_stats(cfg, common.stats_cache, common.exec(),
                                        OnCacheMismatch::error);
  const ComparisonReport report = run_compare(cfg, stats, opts);

  if (out_path.empty()) {
    write_comparison_csv(std::cout, report);
  } else {
    std::ofstream out = open_out(out_path);
    write_comparison_csv(out, report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice surveillance simulator and T-step planner"};
  app.require_subcommand(1);

  const std::vector<std::string> strategy_names = {
      "stationary", "random-walk", "t-step-coordinated",
      "t-step-uncoordinated"};
  const std::vector<std::string> cadence_names = {"every-horizon",
                                                  "every-step"};

  CommonFlags pre_common;
  CLI::App* pre = app.add_subcommand(
      "precompute", "build the per-cell statistics table and cache it");
  pre->add_option("--scenario", pre_common.scenario_path, "scenario file")
      ->required();
  pre->add_option("--stats-cache", pre_common.stats_cache,
                  "cache path (default: scenario with .ptab extension)");
  pre->add_flag("--serial", pre_common.serial, "disable OpenMP");

  CommonFlags run_common;
  Overrides run_over;
  std::string run_record, run_replay, run_out, run_log, run_trace;
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--scenario", run_common.scenario_path, "scenario file")
      ->required();
  run->add_option("--stats-cache", run_common.stats_cache,
                  "stats cache to reuse");
  run->add_flag("--serial", run_common.serial, "disable OpenMP");
  run->add_option("--seed", run_over.seed, "RNG seed override");
  run->add_option("--strategy", run_over.strategy, "strategy override")
      ->check(CLI::IsMember(strategy_names));
  run->add_option("--steps", run_over.steps, "experiment length override")
      ->check(CLI::PositiveNumber);
  run->add_option("--horizon", run_over.horizon, "planning depth override")
      ->check(CLI::PositiveNumber);
  run->add_option("--replan", run_over.replan, "replan cadence override")
      ->check(CLI::IsMember(cadence_names));
  CLI::Option* rec =
      run->add_option("--record", run_record, "record the spawn stream");
  run->add_option("--replay", run_replay, "replay a recorded spawn stream")
      ->excludes(rec);
  run->add_option("--out", run_out, "summary CSV path (default stdout)");
  run->add_option("--log", run_log, "per-step JSONL log path");
  run->add_option("--trace", run_trace, "plan trace JSONL path");

  CommonFlags cmp_common;
  Overrides cmp_over;
  std::vector<std::string> cmp_strategies;
  int cmp_seeds = 5;
  std::string cmp_out;
  CLI::App* cmp = app.add_subcommand(
      "compare", "run several strategies on identical target traffic");
  cmp->add_option("--scenario", cmp_common.scenario_path, "scenario file")
      ->required();
  cmp->add_option("--stats-cache", cmp_common.stats_cache,
                  "stats cache to reuse");
  cmp->add_flag("--serial", cmp_common.serial, "disable OpenMP");
  cmp->add_option("--seed", cmp_over.seed, "base seed override");
  cmp->add_option("--strategy", cmp_strategies,
                  "strategy to include, repeatable (default: "
                  "t-step-coordinated t-step-uncoordinated)")
      ->check(CLI::IsMember(strategy_names));
  cmp->add_option("--seeds", cmp_seeds, "number of seed groups")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--steps", cmp_over.steps, "experiment length override")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--horizon", cmp_over.horizon, "planning depth override")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--replan", cmp_over.replan, "replan cadence override")
      ->check(CLI::IsMember(cadence_names));
  cmp->add_option("--out", cmp_out, "report CSV path (default stdout)");

  CommonFlags rep_common;
  Overrides rep_over;
  std::string rep_replay, rep_out, rep_log, rep_trace;
  CLI::App* rep = app.add_subcommand(
      "replay", "rerun an experiment against a recorded spawn stream");
  rep->add_option("--scenario", rep_common.scenario_path, "scenario file")
      ->required();
  rep->add_option("--stats-cache", rep_common.stats_cache,
                  "stats cache to reuse");
  rep->add_flag("--serial", rep_common.serial, "disable OpenMP");
  rep->add_option("--replay", rep_replay, "recorded spawn stream")
      ->required();
  rep->add_option("--seed", rep_over.seed, "RNG seed override");
  rep->add_option("--strategy", rep_over.strategy, "strategy override")
      ->check(CLI::IsMember(strategy_names));
  rep->add_option("--steps", rep_over.steps, "experiment length override")
      ->check(CLI::PositiveNumber);
  rep->add_option("--horizon", rep_over.horizon, "planning depth override")
      ->check(CLI::PositiveNumber);
  rep->add_option("--replan", rep_over.replan, "replan cadence override")
      ->check(CLI::IsMember(cadence_names));
  rep->add_option("--out", rep_out, "summary CSV path (default stdout)");
  rep->add_option("--log", rep_log, "per-step JSONL log path");
  rep->add_option("--trace", rep_trace, "plan trace JSONL path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (pre->parsed()) return cmd_precompute(pre_common);
    if (run->parsed())
      return cmd_run(run_common, run_over, run_record, run_replay, run_out,
                     run_log, run_trace);
    if (cmp->parsed())
      return cmd_compare(cmp_common, cmp_over, cmp_strategies, cmp_seeds,
                         cmp_out);
    if (rep->parsed())
      return cmd_run(rep_common, rep_over, "", rep_replay, rep_out, rep_log,
                     rep_trace);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
