#include "patrol/lattice_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "patrol/errors.hpp"
#include "patrol/hash.hpp"

namespace patrol {

namespace {

constexpr double kPi = std::numbers::pi;

EscapeCdf build_cdf_from_span(const SourceSpec& source, const AngularSpan& span,
                              const Rect& fov, double speed, int quadrature_n,
                              double bin_width) {
  if (quadrature_n < 2)
    throw std::domain_error("build_escape_cdf: quadrature_n must be >= 2");
  if (bin_width <= 0.0)
    throw std::domain_error("build_escape_cdf: bin_width must be positive");

  // Midpoint samples; the span endpoints are tangent rays whose chords
  // degenerate, so they are deliberately never sampled.
  std::vector<double> transits;
  transits.reserve(static_cast<size_t>(quadrature_n));
  for (int i = 0; i < quadrature_n; ++i) {
    const double a = span.delta + (i + 0.5) * span.theta / quadrature_n;
    if (const auto te = transit_time(source, a, fov, speed))
      transits.push_back(*te);
  }
  if (transits.empty())
    throw std::domain_error("build_escape_cdf: no ray in the span hits");

  EscapeCdf cdf;
  cdf.bin_width = bin_width;
  cdf.t_a = *std::min_element(transits.begin(), transits.end());
  cdf.t_b = *std::max_element(transits.begin(), transits.end());

  const double extent = cdf.t_b - cdf.t_a;
  const int n_bins =
      extent > 0.0
          ? static_cast<int>(std::ceil(extent / bin_width - 1e-12))
          : 1;

  std::vector<std::int64_t> counts(static_cast<size_t>(n_bins), 0);
  for (const double te : transits) {
    int k = static_cast<int>((te - cdf.t_a) / bin_width);
    k = std::clamp(k, 0, n_bins - 1);
    ++counts[static_cast<size_t>(k)];
  }

  cdf.cdf_values.resize(static_cast<size_t>(n_bins));
  std::int64_t running = 0;
  const double total = static_cast<double>(transits.size());
  for (int k = 0; k < n_bins; ++k) {
    running += counts[static_cast<size_t>(k)];
    cdf.cdf_values[static_cast<size_t>(k)] =
        std::min(1.0, static_cast<double>(running) / total);
  }
  cdf.cdf_values.back() = 1.0;
  return cdf;
}

}  // namespace

double EscapeCdf::mean() const {
  double m = 0.0;
  double prev = 0.0;
  double left = t_a;
  for (int i = 0; i < bin_count(); ++i) {
    const double right = edge(i);
    const double mass = cdf_values[static_cast<size_t>(i)] - prev;
    m += mass * 0.5 * (left + right);
    prev = cdf_values[static_cast<size_t>(i)];
    left = right;
  }
  return m;
}

double escape_probability(const EscapeCdf& cdf, double tau) {
  if (tau < 0.0)
    throw std::domain_error("escape_probability: negative time");
  if (cdf.empty())
    throw std::domain_error("escape_probability: empty cdf");
  if (tau < cdf.t_a) return 0.0;
  if (tau >= cdf.t_b) return 1.0;

  int k = static_cast<int>((tau - cdf.t_a) / cdf.bin_width);
  k = std::clamp(k, 0, cdf.bin_count() - 1);
  const double left_x = cdf.t_a + k * cdf.bin_width;
  const double right_x = cdf.edge(k);
  const double left_v = k > 0 ? cdf.cdf_values[static_cast<size_t>(k - 1)] : 0.0;
  const double right_v = cdf.cdf_values[static_cast<size_t>(k)];
  if (right_x <= left_x) return right_v;
  return left_v + (right_v - left_v) * (tau - left_x) / (right_x - left_x);
}

double per_source_rate(const SourceSpec& source, CellIndex cell,
                       const LatticeSpec& lattice) {
  const AngularSpan span = angular_span(source, fov_square(cell, lattice));
  return source.rate * span.theta / kPi;
}

EscapeCdf build_escape_cdf(const SourceSpec& source, CellIndex cell,
                           const LatticeSpec& lattice, double speed,
                           int quadrature_n, double bin_width) {
  const Rect fov = fov_square(cell, lattice);
  const AngularSpan span = angular_span(source, fov);
  if (span.theta <= 0.0)
    throw std::domain_error(
        "build_escape_cdf: cell unreachable from the source");
  return build_cdf_from_span(source, span, fov, speed, quadrature_n,
                             bin_width);
}

CellStats compute_cell_stats(CellIndex cell,
                             const std::vector<SourceSpec>& sources,
                             const LatticeSpec& lattice, double speed,
                             const StatsParams& params) {
  CellStats cs;
  cs.per_source_rates.reserve(sources.size());
  cs.per_source_cdfs.reserve(sources.size());

  const Rect fov = fov_square(cell, lattice);
  for (const SourceSpec& src : sources) {
    const AngularSpan span = angular_span(src, fov);
    const double rate = src.rate * span.theta / kPi;
    cs.per_source_rates.push_back(rate);
    if (span.theta > 0.0) {
      cs.per_source_cdfs.push_back(build_cdf_from_span(
          src, span, fov, speed, params.quadrature_n, params.bin_width));
    } else {
      cs.per_source_cdfs.emplace_back();
    }
    cs.arrival_rate += rate;
  }

  if (cs.arrival_rate > 0.0) {
    // Mean dwell of an arriving target: each source weighted by its share
    // of the arrivals.
    double te = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j) {
      if (cs.per_source_rates[j] > 0.0 && !cs.per_source_cdfs[j].empty())
        te += (cs.per_source_rates[j] / cs.arrival_rate) *
              cs.per_source_cdfs[j].mean();
    }
    cs.expected_escape_time = te;
  }
  cs.expected_detections = cs.arrival_rate * cs.expected_escape_time;
  return cs;
}

std::uint64_t scenario_fingerprint(const LatticeSpec& lattice,
                                   const std::vector<SourceSpec>& sources,
                                   double speed) {
  Fnv1a h;
  h.update_str("patrol-scenario-v1");
  h.update_f64(lattice.cell_size);
  h.update_i32(lattice.n_cols);
  h.update_i32(lattice.n_rows);
  h.update_f64(lattice.fov_side);
  h.update_f64(lattice.origin.x);
  h.update_f64(lattice.origin.y);
  h.update_u64(sources.size());
  for (const SourceSpec& s : sources) {
    h.update_f64(s.position.x);
    h.update_f64(s.position.y);
    h.update_u32(static_cast<std::uint32_t>(s.facing));
    h.update_f64(s.rate);
  }
  h.update_f64(speed);
  return h.value();
}

StatsTable::StatsTable(const LatticeSpec& lattice, const StatsParams& params,
                       std::uint64_t fingerprint, std::vector<CellIndex> cells,
                       std::vector<CellStats> stats)
    : lattice_(lattice),
      params_(params),
      fingerprint_(fingerprint),
      cells_(std::move(cells)),
      stats_(std::move(stats)) {
  index_.assign(static_cast<size_t>(lattice_.n_cols) * lattice_.n_rows, -1);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const CellIndex c = cells_[i];
    index_[static_cast<size_t>(c.row) * lattice_.n_cols + c.col] =
        static_cast<std::int32_t>(i);
  }
}

bool StatsTable::contains(CellIndex cell) const {
  if (!lattice_.in_range(cell)) return false;
  return index_[static_cast<size_t>(cell.row) * lattice_.n_cols + cell.col] >=
         0;
}

const CellStats& StatsTable::at(CellIndex cell) const {
  if (!lattice_.in_range(cell))
    throw std::out_of_range("StatsTable::at: cell index out of range");
  const std::int32_t slot =
      index_[static_cast<size_t>(cell.row) * lattice_.n_cols + cell.col];
  if (slot < 0)
    throw std::out_of_range("StatsTable::at: cell is not admissible");
  return stats_[static_cast<size_t>(slot)];
}

namespace {

StatsTable precompute_impl(const LatticeSpec& lattice,
                           const std::vector<SourceSpec>& sources,
                           double speed, const StatsParams& params,
                           bool parallel) {
  std::vector<CellIndex> cells = admissible_cells(lattice);
  if (cells.empty())
    throw ConfigError(
        "precompute_all: no admissible cells (fov_side too large for the "
        "zone)");

  std::vector<CellStats> stats(cells.size());
  const std::int64_t n = static_cast<std::int64_t>(cells.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i)
      stats[static_cast<size_t>(i)] = compute_cell_stats(
          cells[static_cast<size_t>(i)], sources, lattice, speed, params);
  } else {
    for (std::int64_t i = 0; i < n; ++i)
      stats[static_cast<size_t>(i)] = compute_cell_stats(
          cells[static_cast<size_t>(i)], sources, lattice, speed, params);
  }

  return StatsTable(lattice, params,
                    scenario_fingerprint(lattice, sources, speed),
                    std::move(cells), std::move(stats));
}

}  // namespace

StatsTable precompute_all(const LatticeSpec& lattice,
                          const std::vector<SourceSpec>& sources, double speed,
                          const StatsParams& params, Exec exec) {
  return precompute_impl(lattice, sources, speed, params,
                         exec == Exec::parallel);
}

StatsTable precompute_all_serial(const LatticeSpec& lattice,
                                 const std::vector<SourceSpec>& sources,
                                 double speed, const StatsParams& params) {
  return precompute_impl(lattice, sources, speed, params, false);
}

}  // namespace patrol
