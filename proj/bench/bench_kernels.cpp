// Compares the OpenMP kernels against their serial references: offline
// per-cell statistics and the per-sensor planning fan-out.  Also verifies
// that both execution policies agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>

#include <omp.h>

#include "patrol/planner.hpp"
#include "patrol/scenario.hpp"
#include "patrol/stats_cache.hpp"

using namespace patrol;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string table_bytes(const StatsTable& table) {
  std::ostringstream out;
  save_stats_cache(out, table);
  return out.str();
}

ScenarioConfig bench_scenario() {
  // Mid-size zone so a serial pass stays in the tens of seconds.
  const std::string text = R"({
    "zone": {"width": 300.0, "height": 200.0},
    "lattice": {"cell_size": 10.0, "fov_side": 80.0},
    "lambda": 0.3,
    "sources": [
      {"position": [100.0, -5.0], "facing": "north"},
      {"position": [200.0, 205.0], "facing": "south"},
      {"position": [-5.0, 100.0], "facing": "east"},
      {"position": [305.0, 100.0], "facing": "west"}
    ],
    "target_speed": 10.0,
    "sensors": {"count": 8},
    "horizon": 3
  })";
  return parse_scenario_text(text);
}

}  // namespace

int main(int argc, char** argv) {
  int quadrature_n = 4096;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quadrature") == 0 && i + 1 < argc)
      quadrature_n = std::atoi(argv[++i]);
  }

  ScenarioConfig cfg = bench_scenario();
  cfg.stats.quadrature_n = quadrature_n;

  std::printf("threads available: %d\n", omp_get_max_threads());
  std::printf("cells: %zu, sources: %zu, quadrature_n: %d\n\n",
              admissible_cells(cfg.lattice).size(), cfg.sources.size(),
              cfg.stats.quadrature_n);

  auto t0 = Clock::now();
  const StatsTable serial = precompute_all_serial(
      cfg.lattice, cfg.sources, cfg.target_speed, cfg.stats);
  const double t_serial = seconds_since(t0);

  t0 = Clock::now();
  const StatsTable parallel =
      precompute_all(cfg.lattice, cfg.sources, cfg.target_speed, cfg.stats,
                     Exec::parallel);
  const double t_parallel = seconds_since(t0);

  const bool stats_equal = table_bytes(serial) == table_bytes(parallel);
  std::printf("precompute_all   serial %8.3f s   parallel %8.3f s   "
              "speedup %.2fx   bit-identical: %s\n",
              t_serial, t_parallel, t_serial / t_parallel,
              stats_equal ? "yes" : "NO");

  // Planning fan-out: many sensors, empty observation lists.
  std::vector<CellIndex> cells;
  const auto admissible = admissible_cells(cfg.lattice);
  for (std::size_t i = 0; i < admissible.size(); i += 2)
    cells.push_back(admissible[i]);
  std::vector<std::vector<TargetObservation>> obs(cells.size());

  t0 = Clock::now();
  const auto plans_serial =
      independent_plans(cells, obs, serial, cfg.horizon, Exec::serial);
  const double p_serial = seconds_since(t0);

  t0 = Clock::now();
  const auto plans_parallel =
      independent_plans(cells, obs, serial, cfg.horizon, Exec::parallel);
  const double p_parallel = seconds_since(t0);

  bool plans_equal = plans_serial.size() == plans_parallel.size();
  for (std::size_t i = 0; plans_equal && i < plans_serial.size(); ++i) {
    plans_equal = plans_serial[i].objective == plans_parallel[i].objective &&
                  plans_serial[i].path == plans_parallel[i].path;
  }
  std::printf("planning fan-out serial %8.3f s   parallel %8.3f s   "
              "speedup %.2fx   bit-identical: %s\n",
              p_serial, p_parallel, p_serial / p_parallel,
              plans_equal ? "yes" : "NO");

  return stats_equal && plans_equal ? 0 : 1;
}
