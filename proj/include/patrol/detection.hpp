#pragma once

#include <iosfwd>
#include <vector>

#include "patrol/lattice_stats.hpp"

namespace patrol {

/// Snapshot of a target a sensor currently sees: position and the velocity
/// it is assumed to hold over the planning horizon.
struct TargetObservation {
  Point position;
  Vec2 velocity;
};

/// Number of observed targets still inside dest's FOV after propagating
/// their straight-line motion t steps ahead.  t >= 1.
int surviving_count(const std::vector<TargetObservation>& observations,
                    CellIndex dest, int t, const LatticeSpec& lattice);

/// Arrival-minus-escape term of the expected detection count at look-ahead
/// t: lambda*t minus, per source, the probability mass of targets that
/// arrived s steps in and have already left.
double statistical_term(const CellStats& stats, int t);

/// Expected detections at candidate cell `to` and look-ahead t for a sensor
/// currently at `from`: surviving observed targets, plus the statistical
/// term of the planning cell scaled by the FOV overlap kappa between from
/// and to, plus (1 - kappa) times the stationary expectation of `to`.
double node_value(const std::vector<TargetObservation>& observations,
                  CellIndex from, CellIndex to, int t,
                  const StatsTable& stats);

/// Node values over the reachable space-time domain of one sensor: cells
/// within Chebyshev distance t of the planning cell, admissible only, for
/// t = 1..horizon.
class ValueLattice {
 public:
  ValueLattice() = default;
  ValueLattice(CellIndex planning_cell, int horizon,
               const LatticeSpec& lattice);

  CellIndex planning_cell() const { return planning_cell_; }
  int horizon() const { return horizon_; }

  bool in_domain(CellIndex cell, int t) const;

  /// Throws std::out_of_range outside the domain.
  double at(CellIndex cell, int t) const;
  void set(CellIndex cell, int t, double value);

  /// Visits every (cell, t, value), t-major then row-major.
  template <typename F>
  void for_each(F&& f) const {
    for (int t = 1; t <= horizon_; ++t) {
      const Layer& layer = layers_[static_cast<size_t>(t - 1)];
      for (int row = layer.row0; row < layer.row0 + layer.n_rows; ++row)
        for (int col = layer.col0; col < layer.col0 + layer.n_cols; ++col) {
          const CellIndex c{col, row};
          if (cheby_distance(c, planning_cell_) <= t)
            f(c, t, layer.values[slot(layer, c)]);
        }
    }
  }

  /// Rewrites every value as f(cell, t, value).
  template <typename F>
  void transform(F&& f) {
    for (int t = 1; t <= horizon_; ++t) {
      Layer& layer = layers_[static_cast<size_t>(t - 1)];
      for (int row = layer.row0; row < layer.row0 + layer.n_rows; ++row)
        for (int col = layer.col0; col < layer.col0 + layer.n_cols; ++col) {
          const CellIndex c{col, row};
          if (cheby_distance(c, planning_cell_) <= t) {
            double& v = layer.values[slot(layer, c)];
            v = f(c, t, v);
          }
        }
    }
  }

  /// CSV dump: cell_col,cell_row,t,value.
  void write_csv(std::ostream& out) const;

 private:
  struct Layer {
    int col0 = 0;
    int row0 = 0;
    int n_cols = 0;
    int n_rows = 0;
    std::vector<double> values;
  };

  static std::size_t slot(const Layer& layer, CellIndex c) {
    return static_cast<size_t>(c.row - layer.row0) * layer.n_cols +
           static_cast<size_t>(c.col - layer.col0);
  }

  const Layer& layer_at(int t) const {
    return layers_[static_cast<size_t>(t - 1)];
  }

  CellIndex planning_cell_;
  int horizon_ = 0;
  std::vector<Layer> layers_;
};

/// Evaluates node_value over the whole reachable domain of the sensor at
/// planning_cell.  Produces values bit-identical to per-node node_value
/// calls (both run the same inner kernel).
ValueLattice build_value_lattice(CellIndex planning_cell,
                                 const std::vector<TargetObservation>& observations,
                                 int horizon, const StatsTable& stats);

namespace detail {

/// Shared kernel behind node_value and build_value_lattice: blends the
/// planning cell's statistical term into the destination's stationary
/// expectation by FOV overlap.  stat_term = statistical_term(planning cell
/// stats, t), dest_expected = expected_detections of the destination cell.
double blend_value(int survivors, double kappa, double stat_term,
                   double dest_expected);

}  // namespace detail

}  // namespace patrol
