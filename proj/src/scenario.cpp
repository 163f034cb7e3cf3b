#include "patrol/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "patrol/errors.hpp"

namespace patrol {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("scenario: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) { ok = true; break; }
    if (!ok) fail(path.empty() ? item.key() : path + "." + item.key(),
                  "unknown key");
  }
}

double req_num(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path + key, "missing");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + key, "must be a number");
  return v.get<double>();
}

double opt_num(const json& obj, const std::string& path, const char* key,
               double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + key, "must be a number");
  return v.get<double>();
}

int opt_int(const json& obj, const std::string& path, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + key, "must be an integer");
  return v.get<int>();
}

std::string opt_str(const json& obj, const std::string& path, const char* key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(path + key, "must be a string");
  return v.get<std::string>();
}

Point req_point(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path + key, "missing");
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number())
    fail(path + key, "must be a [x, y] pair of numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

Facing parse_facing(const std::string& s, const std::string& path) {
  if (s == "north") return Facing::north;
  if (s == "south") return Facing::south;
  if (s == "east") return Facing::east;
  if (s == "west") return Facing::west;
  fail(path, "facing must be north, south, east, or west");
}

const char* facing_label(Facing f) {
  switch (f) {
    case Facing::north: return "north";
    case Facing::south: return "south";
    case Facing::east: return "east";
    case Facing::west: return "west";
  }
  return "?";
}

/// Even grid over the admissible box, row-major, deterministic.
std::vector<CellIndex> place_sensors(int count, const LatticeSpec& lattice) {
  const AdmissibleBox box = admissible_box(lattice);
  if (box.empty()) fail("sensors.count", "lattice has no admissible cells");
  const std::int64_t capacity =
      static_cast<std::int64_t>(box.cols()) * box.rows();
  if (count > capacity)
    fail("sensors.count", "more sensors than admissible cells");

  int grid_cols = static_cast<int>(std::lround(
      std::sqrt(static_cast<double>(count) * box.cols() / box.rows())));
  grid_cols = std::clamp(grid_cols, 1, box.cols());
  auto rows_for = [&](int gc) {
    return std::min((count + gc - 1) / gc, box.rows());
  };
  while (static_cast<std::int64_t>(grid_cols) * rows_for(grid_cols) < count &&
         grid_cols < box.cols())
    ++grid_cols;
  const int grid_rows = rows_for(grid_cols);
  if (static_cast<std::int64_t>(grid_cols) * grid_rows < count)
    fail("sensors.count", "cannot place sensors on an even grid");

  std::vector<CellIndex> cells;
  cells.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int gi = k % grid_cols;
    const int gj = k / grid_cols;
    const int col =
        box.col_lo + static_cast<int>((gi + 0.5) * box.cols() / grid_cols);
    const int row =
        box.row_lo + static_cast<int>((gj + 0.5) * box.rows() / grid_rows);
    cells.push_back({std::min(col, box.col_hi), std::min(row, box.row_hi)});
  }
  return cells;
}

ScenarioConfig parse_scenario_doc(const json& doc) {
  if (!doc.is_object()) fail("<root>", "scenario must be a JSON object");
  check_keys(doc, "",
             {"zone", "lattice", "lambda", "sources", "target_speed",
              "sensors", "horizon", "steps", "strategy", "replan", "seed",
              "stats"});

  ScenarioConfig cfg;

  if (!doc.contains("zone")) fail("zone", "missing");
  const json& zone = doc.at("zone");
  if (!zone.is_object()) fail("zone", "must be an object");
  check_keys(zone, "zone", {"width", "height", "origin"});
  cfg.zone.width = req_num(zone, "zone.", "width");
  cfg.zone.height = req_num(zone, "zone.", "height");
  if (cfg.zone.width <= 0.0) fail("zone.width", "must be positive");
  if (cfg.zone.height <= 0.0) fail("zone.height", "must be positive");
  cfg.zone.origin =
      zone.contains("origin") ? req_point(zone, "zone.", "origin") : Point{};

  if (!doc.contains("lattice")) fail("lattice", "missing");
  const json& lattice = doc.at("lattice");
  if (!lattice.is_object()) fail("lattice", "must be an object");
  check_keys(lattice, "lattice", {"cell_size", "fov_side"});
  const double cell_size = req_num(lattice, "lattice.", "cell_size");
  const double fov_side = req_num(lattice, "lattice.", "fov_side");
  if (cell_size <= 0.0) fail("lattice.cell_size", "must be positive");
  if (fov_side < cell_size)
    fail("lattice.fov_side", "must be at least lattice.cell_size");
  const double cols = cfg.zone.width / cell_size;
  const double rows = cfg.zone.height / cell_size;
  if (std::abs(cols - std::round(cols)) > 1e-9 ||
      std::abs(rows - std::round(rows)) > 1e-9)
    fail("lattice.cell_size", "zone extents must be integer multiples of it");
  cfg.lattice = make_lattice(cfg.zone, cell_size, fov_side);

  cfg.lambda = opt_num(doc, "", "lambda", 0.3);
  if (cfg.lambda < 0.0) fail("lambda", "must be non-negative");

  if (!doc.contains("sources")) fail("sources", "missing");
  const json& sources = doc.at("sources");
  if (!sources.is_array()) fail("sources", "must be an array");
  const Rect zone_rect = cfg.zone.rect();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const std::string path = "sources[" + std::to_string(i) + "]";
    const json& s = sources[i];
    if (!s.is_object()) fail(path, "must be an object");
    check_keys(s, path, {"position", "facing", "rate"});
    SourceSpec src;
    src.position = req_point(s, path + ".", "position");
    src.facing =
        parse_facing(opt_str(s, path + ".", "facing", ""), path + ".facing");
    src.rate = opt_num(s, path + ".", "rate", cfg.lambda);
    if (src.rate < 0.0) fail(path + ".rate", "must be non-negative");

    if (zone_rect.contains(src.position))
      fail(path + ".position", "must lie strictly outside the zone");
    // The zone must sit inside the source's facing half-plane.
    bool ok = false;
    switch (src.facing) {
      case Facing::north: ok = src.position.y < zone_rect.lo.y; break;
      case Facing::south: ok = src.position.y > zone_rect.hi.y; break;
      case Facing::east: ok = src.position.x < zone_rect.lo.x; break;
      case Facing::west: ok = src.position.x > zone_rect.hi.x; break;
    }
    if (!ok)
      fail(path + ".facing",
           "zone does not lie inside the facing half-plane");
    cfg.sources.push_back(src);
  }

  cfg.target_speed = opt_num(doc, "", "target_speed", 10.0);
  if (cfg.target_speed <= 0.0) fail("target_speed", "must be positive");

  if (!doc.contains("sensors")) fail("sensors", "missing");
  const json& sensors = doc.at("sensors");
  if (!sensors.is_object()) fail("sensors", "must be an object");
  check_keys(sensors, "sensors", {"count", "cells"});
  if (sensors.contains("cells")) {
    const json& cells = sensors.at("cells");
    if (!cells.is_array() || cells.empty())
      fail("sensors.cells", "must be a non-empty array");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string path = "sensors.cells[" + std::to_string(i) + "]";
      const json& c = cells[i];
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
          !c[1].is_number_integer())
        fail(path, "must be a [col, row] pair of integers");
      const CellIndex cell{c[0].get<int>(), c[1].get<int>()};
      if (!admissible(cell, cfg.lattice))
        fail(path, "cell is not admissible (FOV must fit inside the zone)");
      cfg.sensor_cells.push_back(cell);
    }
    if (sensors.contains("count") &&
        opt_int(sensors, "sensors.", "count", 0) !=
            static_cast<int>(cfg.sensor_cells.size()))
      fail("sensors.count", "disagrees with sensors.cells length");
  } else {
    const int count = opt_int(sensors, "sensors.", "count", 0);
    if (count < 1) fail("sensors.count", "must be at least 1");
    cfg.sensor_cells = place_sensors(count, cfg.lattice);
  }

  cfg.horizon = opt_int(doc, "", "horizon", 3);
  if (cfg.horizon < 1) fail("horizon", "must be at least 1");
  cfg.steps = opt_int(doc, "", "steps", 150);
  if (cfg.steps < 1) fail("steps", "must be at least 1");

  cfg.strategy =
      parse_strategy(opt_str(doc, "", "strategy", "t-step-coordinated"));
  cfg.replan = parse_cadence(opt_str(doc, "", "replan", "every-horizon"));

  if (doc.contains("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer())
      fail("seed", "must be a non-negative integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0)
      fail("seed", "must be a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }

  if (doc.contains("stats")) {
    const json& stats = doc.at("stats");
    if (!stats.is_object()) fail("stats", "must be an object");
    check_keys(stats, "stats", {"quadrature_n", "bin_width"});
    cfg.stats.quadrature_n =
        opt_int(stats, "stats.", "quadrature_n", cfg.stats.quadrature_n);
    cfg.stats.bin_width =
        opt_num(stats, "stats.", "bin_width", cfg.stats.bin_width);
    if (cfg.stats.quadrature_n < 2)
      fail("stats.quadrature_n", "must be at least 2");
    if (cfg.stats.bin_width <= 0.0)
      fail("stats.bin_width", "must be positive");
  }

  return cfg;
}

}  // namespace

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  auto zone_eq = [](const ZoneSpec& x, const ZoneSpec& y) {
    return x.width == y.width && x.height == y.height &&
           x.origin.x == y.origin.x && x.origin.y == y.origin.y;
  };
  auto src_eq = [](const SourceSpec& x, const SourceSpec& y) {
    return x.position.x == y.position.x && x.position.y == y.position.y &&
           x.facing == y.facing && x.rate == y.rate;
  };
  if (!zone_eq(a.zone, b.zone)) return false;
  if (a.lattice.cell_size != b.lattice.cell_size ||
      a.lattice.n_cols != b.lattice.n_cols ||
      a.lattice.n_rows != b.lattice.n_rows ||
      a.lattice.fov_side != b.lattice.fov_side ||
      a.lattice.origin.x != b.lattice.origin.x ||
      a.lattice.origin.y != b.lattice.origin.y)
    return false;
  if (a.lambda != b.lambda) return false;
  if (a.sources.size() != b.sources.size()) return false;
  for (std::size_t i = 0; i < a.sources.size(); ++i)
    if (!src_eq(a.sources[i], b.sources[i])) return false;
  if (a.target_speed != b.target_speed) return false;
  if (a.sensor_cells.size() != b.sensor_cells.size()) return false;
  for (std::size_t i = 0; i < a.sensor_cells.size(); ++i)
    if (a.sensor_cells[i] != b.sensor_cells[i]) return false;
  return a.horizon == b.horizon && a.steps == b.steps &&
         a.strategy == b.strategy && a.replan == b.replan &&
         a.seed == b.seed && a.stats == b.stats;
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario: " + path.string() + ": " + e.what());
  }
  return parse_scenario_doc(doc);
}

ScenarioConfig parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return parse_scenario_doc(doc);
}

std::string serialize_scenario(const ScenarioConfig& config) {
  json doc;
  doc["zone"] = {{"width", config.zone.width},
                 {"height", config.zone.height},
                 {"origin", {config.zone.origin.x, config.zone.origin.y}}};
  doc["lattice"] = {{"cell_size", config.lattice.cell_size},
                    {"fov_side", config.lattice.fov_side}};
  doc["lambda"] = config.lambda;
  json sources = json::array();
  for (const SourceSpec& s : config.sources) {
    sources.push_back({{"position", {s.position.x, s.position.y}},
                       {"facing", facing_label(s.facing)},
                       {"rate", s.rate}});
  }
  doc["sources"] = std::move(sources);
  doc["target_speed"] = config.target_speed;
  json cells = json::array();
  for (const CellIndex c : config.sensor_cells)
    cells.push_back({c.col, c.row});
  doc["sensors"] = {{"cells", std::move(cells)}};
  doc["horizon"] = config.horizon;
  doc["steps"] = config.steps;
  doc["strategy"] = strategy_label(config.strategy);
  doc["replan"] = cadence_label(config.replan);
  doc["seed"] = config.seed;
  doc["stats"] = {{"quadrature_n", config.stats.quadrature_n},
                  {"bin_width", config.stats.bin_width}};
  return doc.dump(2) + "\n";
}

std::uint64_t scenario_fingerprint(const ScenarioConfig& config) {
  return scenario_fingerprint(config.lattice, config.sources,
                              config.target_speed);
}

}  // namespace patrol
