#include "patrol/detection.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace patrol {

int surviving_count(const std::vector<TargetObservation>& observations,
                    CellIndex dest, int t, const LatticeSpec& lattice) {
  if (t < 1) throw std::domain_error("surviving_count: t must be >= 1");
  const Rect fov = fov_square(dest, lattice);
  int count = 0;
  for (const TargetObservation& obs : observations) {
    const Point p = obs.position + obs.velocity * static_cast<double>(t);
    if (fov.contains(p)) ++count;
  }
  return count;
}

double statistical_term(const CellStats& stats, int t) {
  if (t < 1) throw std::domain_error("statistical_term: t must be >= 1");
  double escaped = 0.0;
  for (std::size_t j = 0; j < stats.per_source_rates.size(); ++j) {
    const double rate = stats.per_source_rates[j];
    if (rate <= 0.0 || stats.per_source_cdfs[j].empty()) continue;
    // Targets that arrived s steps into the look-ahead have had t - s steps
    // to cross; s = t contributes zero because no transit is instantaneous.
    double mass = 0.0;
    for (int s = 1; s <= t; ++s)
      mass += escape_probability(stats.per_source_cdfs[j],
                                 static_cast<double>(t - s));
    escaped += rate * mass;
  }
  return stats.arrival_rate * static_cast<double>(t) - escaped;
}

namespace detail {

double blend_value(int survivors, double kappa, double stat_term,
                   double dest_expected) {
  // stat_term is provably non-negative (each escape probability is <= 1),
  // so the clamp never bites; it guards the estimate contract regardless.
  return std::max(0.0, static_cast<double>(survivors) + kappa * stat_term +
                           (1.0 - kappa) * dest_expected);
}

}  // namespace detail

double node_value(const std::vector<TargetObservation>& observations,
                  CellIndex from, CellIndex to, int t,
                  const StatsTable& stats) {
  if (t < 1) throw std::domain_error("node_value: t must be >= 1");
  if (!stats.contains(from))
    throw std::domain_error("node_value: planning cell not admissible");
  if (!stats.contains(to))
    throw std::domain_error("node_value: destination cell not admissible");
  if (cheby_distance(from, to) > t)
    throw std::domain_error("node_value: destination unreachable within t");

  const LatticeSpec& lat = stats.lattice();
  const double kappa = overlap_fraction(from, to, lat);
  const double stat = statistical_term(stats.at(from), t);
  const int survivors = surviving_count(observations, to, t, lat);
  return detail::blend_value(survivors, kappa, stat,
                             stats.at(to).expected_detections);
}

ValueLattice::ValueLattice(CellIndex planning_cell, int horizon,
                           const LatticeSpec& lattice)
    : planning_cell_(planning_cell), horizon_(horizon) {
  if (horizon < 1)
    throw std::domain_error("ValueLattice: horizon must be >= 1");
  const AdmissibleBox box = admissible_box(lattice);
  layers_.reserve(static_cast<size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) {
    Layer layer;
    layer.col0 = std::max(planning_cell.col - t, box.col_lo);
    layer.row0 = std::max(planning_cell.row - t, box.row_lo);
    const int col1 = std::min(planning_cell.col + t, box.col_hi);
    const int row1 = std::min(planning_cell.row + t, box.row_hi);
    layer.n_cols = std::max(0, col1 - layer.col0 + 1);
    layer.n_rows = std::max(0, row1 - layer.row0 + 1);
    layer.values.assign(
        static_cast<size_t>(layer.n_cols) * static_cast<size_t>(layer.n_rows),
        0.0);
    layers_.push_back(std::move(layer));
  }
}

bool ValueLattice::in_domain(CellIndex cell, int t) const {
  if (t < 1 || t > horizon_) return false;
  const Layer& layer = layer_at(t);
  if (cell.col < layer.col0 || cell.col >= layer.col0 + layer.n_cols ||
      cell.row < layer.row0 || cell.row >= layer.row0 + layer.n_rows)
    return false;
  return cheby_distance(cell, planning_cell_) <= t;
}

double ValueLattice::at(CellIndex cell, int t) const {
  if (!in_domain(cell, t))
    throw std::out_of_range("ValueLattice::at: (cell, t) outside domain");
  const Layer& layer = layer_at(t);
  return layer.values[slot(layer, cell)];
}

void ValueLattice::set(CellIndex cell, int t, double value) {
  if (!in_domain(cell, t))
    throw std::out_of_range("ValueLattice::set: (cell, t) outside domain");
  Layer& layer = layers_[static_cast<size_t>(t - 1)];
  layer.values[slot(layer, cell)] = value;
}

void ValueLattice::write_csv(std::ostream& out) const {
  out << "cell_col,cell_row,t,value\n";
  for_each([&out](CellIndex c, int t, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g\n", c.col, c.row, t, v);
    out << buf;
  });
}

ValueLattice build_value_lattice(
    CellIndex planning_cell,
    const std::vector<TargetObservation>& observations, int horizon,
    const StatsTable& stats) {
  if (!stats.contains(planning_cell))
    throw std::domain_error(
        "build_value_lattice: planning cell not admissible");

  const LatticeSpec& lat = stats.lattice();
  ValueLattice values(planning_cell, horizon, lat);

  std::vector<double> stat_terms(static_cast<size_t>(horizon) + 1, 0.0);
  const CellStats& origin_stats = stats.at(planning_cell);
  for (int t = 1; t <= horizon; ++t)
    stat_terms[static_cast<size_t>(t)] = statistical_term(origin_stats, t);

  const AdmissibleBox box = admissible_box(lat);
  for (int t = 1; t <= horizon; ++t) {
    const double stat = stat_terms[static_cast<size_t>(t)];
    const int col0 = std::max(planning_cell.col - t, box.col_lo);
    const int col1 = std::min(planning_cell.col + t, box.col_hi);
    const int row0 = std::max(planning_cell.row - t, box.row_lo);
    const int row1 = std::min(planning_cell.row + t, box.row_hi);
    for (int row = row0; row <= row1; ++row) {
      for (int col = col0; col <= col1; ++col) {
        const CellIndex to{col, row};
        const double kappa = overlap_fraction(planning_cell, to, lat);
        const int survivors = surviving_count(observations, to, t, lat);
        values.set(to, t,
                   detail::blend_value(survivors, kappa, stat,
                                       stats.at(to).expected_detections));
      }
    }
  }
  return values;
}

}  // namespace patrol
