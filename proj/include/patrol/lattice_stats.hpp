#pragma once

#include <cstdint>
#include <vector>

#include "patrol/geometry.hpp"
#include "patrol/parallel.hpp"

namespace patrol {

/// Escape-time distribution for targets from one source crossing one cell's
/// FOV square.  Piecewise linear over uniform bins on [t_a, t_b]; the last
/// bin is shortened so the curve reaches exactly 1 at t_b.
struct EscapeCdf {
  double t_a = 0.0;        // fastest transit, time-steps
  double t_b = 0.0;        // slowest transit
  double bin_width = 0.0;  // nominal bin width, time-steps
  std::vector<double> cdf_values;  // value at each bin's right edge; last is 1

  bool empty() const { return cdf_values.empty(); }
  int bin_count() const { return static_cast<int>(cdf_values.size()); }

  /// Right edge of bin i; the final edge is t_b exactly.
  double edge(int i) const {
    return i + 1 == bin_count() ? t_b : t_a + (i + 1) * bin_width;
  }

  /// Mean escape time under the piecewise-linear model.
  double mean() const;
};

/// P(escape time < tau), linearly interpolated between bin edges; exactly 0
/// below t_a and exactly 1 at and above t_b.  Throws std::domain_error for
/// negative tau or an empty CDF.
double escape_probability(const EscapeCdf& cdf, double tau);

struct StatsParams {
  int quadrature_n = 4096;  // angular quadrature samples per (cell, source)
  double bin_width = 0.1;   // CDF bin width, time-steps

  friend bool operator==(const StatsParams& a, const StatsParams& b) {
    return a.quadrature_n == b.quadrature_n && a.bin_width == b.bin_width;
  }
};

/// Stationary per-cell statistics: rate of target entries into the FOV,
/// expected dwell, and their product, the expected number of targets under
/// view at any instant.
struct CellStats {
  double arrival_rate = 0.0;
  std::vector<double> per_source_rates;    // 0 when the source cannot reach
  std::vector<EscapeCdf> per_source_cdfs;  // empty when unreachable
  double expected_escape_time = 0.0;       // arrival-weighted mean dwell
  double expected_detections = 0.0;        // arrival_rate * escape time
};

/// Entry rate of targets from one source into a cell's FOV: the source rate
/// scaled by the fraction theta/pi of takeoff angles that reach the square.
double per_source_rate(const SourceSpec& source, CellIndex cell,
                       const LatticeSpec& lattice);

/// Escape-time CDF by deterministic midpoint quadrature over the angular
/// span.  Throws std::domain_error when the cell is unreachable from the
/// source or parameters are degenerate (quadrature_n < 2, bin_width <= 0).
EscapeCdf build_escape_cdf(const SourceSpec& source, CellIndex cell,
                           const LatticeSpec& lattice, double speed,
                           int quadrature_n, double bin_width);

CellStats compute_cell_stats(CellIndex cell,
                             const std::vector<SourceSpec>& sources,
                             const LatticeSpec& lattice, double speed,
                             const StatsParams& params = {});

/// Hash of everything the offline tables depend on apart from the
/// quadrature parameters: lattice geometry, sources, and target speed.
std::uint64_t scenario_fingerprint(const LatticeSpec& lattice,
                                   const std::vector<SourceSpec>& sources,
                                   double speed);

/// Precomputed statistics for every admissible cell.
class StatsTable {
 public:
  StatsTable() = default;
  StatsTable(const LatticeSpec& lattice, const StatsParams& params,
             std::uint64_t fingerprint, std::vector<CellIndex> cells,
             std::vector<CellStats> stats);

  const LatticeSpec& lattice() const { return lattice_; }
  const StatsParams& params() const { return params_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<CellIndex>& cells() const { return cells_; }
  const CellStats& stats_by_index(std::size_t i) const { return stats_[i]; }

  bool contains(CellIndex cell) const;

  /// Throws std::out_of_range for a cell outside the admissible set.
  const CellStats& at(CellIndex cell) const;

 private:
  LatticeSpec lattice_;
  StatsParams params_;
  std::uint64_t fingerprint_ = 0;
  std::vector<CellIndex> cells_;   // admissible cells, row-major
  std::vector<CellStats> stats_;   // parallel to cells_
  std::vector<std::int32_t> index_;  // row*n_cols+col -> slot, -1 outside
};

/// Offline precomputation over all admissible cells.  Cells are independent,
/// so Exec::parallel distributes them across OpenMP threads; results are
/// bit-identical to the serial reference.  Throws ConfigError when the
/// lattice has no admissible cells.
StatsTable precompute_all(const LatticeSpec& lattice,
                          const std::vector<SourceSpec>& sources, double speed,
                          const StatsParams& params = {},
                          Exec exec = Exec::parallel);

/// Serial reference implementation, kept for testing and benchmarking.
StatsTable precompute_all_serial(const LatticeSpec& lattice,
                                 const std::vector<SourceSpec>& sources,
                                 double speed, const StatsParams& params = {});

}  // namespace patrol
