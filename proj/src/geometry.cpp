#include "patrol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace patrol {

namespace {

constexpr double kPi = std::numbers::pi;

// Relative slack for float comparisons against zone boundaries.
double boundary_eps(const LatticeSpec& lattice) {
  return 1e-9 * lattice.cell_size;
}

}  // namespace

LatticeSpec make_lattice(const ZoneSpec& zone, double cell_size,
                         double fov_side) {
  if (zone.width <= 0.0 || zone.height <= 0.0)
    throw std::invalid_argument("make_lattice: zone extents must be positive");
  if (cell_size <= 0.0)
    throw std::invalid_argument("make_lattice: cell_size must be positive");
  if (fov_side < cell_size)
    throw std::invalid_argument(
        "make_lattice: fov_side must be at least cell_size");

  const double cols = zone.width / cell_size;
  const double rows = zone.height / cell_size;
  const double rc = std::round(cols);
  const double rr = std::round(rows);
  if (std::abs(cols - rc) > 1e-9 || std::abs(rows - rr) > 1e-9)
    throw std::invalid_argument(
        "make_lattice: zone extents must be integer multiples of cell_size");

  LatticeSpec lat;
  lat.cell_size = cell_size;
  lat.n_cols = static_cast<int>(rc);
  lat.n_rows = static_cast<int>(rr);
  lat.fov_side = fov_side;
  lat.origin = zone.origin;
  return lat;
}

Vec2 ray_direction(Facing facing, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  switch (facing) {
    case Facing::north: return {c, s};
    case Facing::south: return {c, -s};
    case Facing::east: return {s, c};
    case Facing::west: return {-s, c};
  }
  return {};
}

std::pair<double, double> frame_coords(Facing facing, Vec2 d) {
  switch (facing) {
    case Facing::north: return {d.x, d.y};
    case Facing::south: return {d.x, -d.y};
    case Facing::east: return {d.y, d.x};
    case Facing::west: return {d.y, -d.x};
  }
  return {};
}

AngularSpan angular_span(const SourceSpec& source, const Rect& square) {
  if (square.contains(source.position))
    throw std::domain_error("angular_span: source lies inside the square");

  const std::array<Point, 4> vertices = {{{square.lo.x, square.lo.y},
                                          {square.hi.x, square.lo.y},
                                          {square.hi.x, square.hi.y},
                                          {square.lo.x, square.hi.y}}};
  std::array<double, 4> angles{};
  double amin = std::numeric_limits<double>::infinity();
  double amax = -amin;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto [u, w] = frame_coords(source.facing, vertices[i] - source.position);
    angles[i] = std::atan2(w, u);
    amin = std::min(amin, angles[i]);
    amax = std::max(amax, angles[i]);
  }

  double lo, hi;
  if (amax - amin > kPi) {
    // The vertex angles straddle the cut at +-pi, so the true arc wraps
    // around the back.  Its forward part runs from the smallest
    // non-negative vertex angle (the near corner) up to pi.
    lo = kPi;
    for (const double a : angles)
      if (a >= 0.0) lo = std::min(lo, a);
    hi = kPi;
  } else {
    lo = std::max(0.0, amin);
    hi = std::min(kPi, amax);
  }
  if (hi <= lo) return {std::clamp(lo, 0.0, kPi), 0.0};
  return {lo, hi - lo};
}

std::optional<std::pair<double, double>> ray_rect_span(Point origin, Vec2 dir,
                                                       const Rect& rect) {
  double t_lo = 0.0;
  double t_hi = std::numeric_limits<double>::infinity();

  if (dir.x == 0.0) {
    if (origin.x < rect.lo.x || origin.x > rect.hi.x) return std::nullopt;
  } else {
    double a = (rect.lo.x - origin.x) / dir.x;
    double b = (rect.hi.x - origin.x) / dir.x;
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
  }

  if (dir.y == 0.0) {
    if (origin.y < rect.lo.y || origin.y > rect.hi.y) return std::nullopt;
  } else {
    double a = (rect.lo.y - origin.y) / dir.y;
    double b = (rect.hi.y - origin.y) / dir.y;
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
  }

  if (t_lo > t_hi) return std::nullopt;
  return std::make_pair(t_lo, t_hi);
}

std::optional<double> transit_time(const SourceSpec& source,
                                   double takeoff_angle, const Rect& square,
                                   double speed) {
  if (speed <= 0.0)
    throw std::domain_error("transit_time: speed must be positive");
  const Vec2 dir = ray_direction(source.facing, takeoff_angle);
  const auto span = ray_rect_span(source.position, dir, square);
  if (!span) return std::nullopt;
  return (span->second - span->first) / speed;
}

Rect fov_square(CellIndex cell, const LatticeSpec& lattice) {
  if (!lattice.in_range(cell))
    throw std::out_of_range("fov_square: cell index (" +
                            std::to_string(cell.col) + ", " +
                            std::to_string(cell.row) + ") out of range");
  return Rect::centered(lattice.cell_center(cell), lattice.fov_side);
}

double overlap_fraction(CellIndex a, CellIndex b, const LatticeSpec& lattice) {
  if (!lattice.in_range(a) || !lattice.in_range(b))
    throw std::out_of_range("overlap_fraction: cell index out of range");
  const double L = lattice.fov_side;
  const double dx = std::abs(a.col - b.col) * lattice.cell_size;
  const double dy = std::abs(a.row - b.row) * lattice.cell_size;
  return std::max(0.0, L - dx) * std::max(0.0, L - dy) / (L * L);
}

bool admissible(CellIndex cell, const LatticeSpec& lattice) {
  if (!lattice.in_range(cell)) return false;
  const double eps = boundary_eps(lattice);
  const Rect fov = Rect::centered(lattice.cell_center(cell), lattice.fov_side);
  const Rect zone = lattice.zone_rect();
  return fov.lo.x >= zone.lo.x - eps && fov.lo.y >= zone.lo.y - eps &&
         fov.hi.x <= zone.hi.x + eps && fov.hi.y <= zone.hi.y + eps;
}

AdmissibleBox admissible_box(const LatticeSpec& lattice) {
  AdmissibleBox box;
  box.col_lo = lattice.n_cols;
  box.col_hi = -1;
  box.row_lo = lattice.n_rows;
  box.row_hi = -1;

  const double eps = boundary_eps(lattice);
  const Rect zone = lattice.zone_rect();
  const double half = lattice.fov_side / 2.0;

  for (int col = 0; col < lattice.n_cols; ++col) {
    const double cx = lattice.origin.x + (col + 0.5) * lattice.cell_size;
    if (cx - half >= zone.lo.x - eps && cx + half <= zone.hi.x + eps) {
      box.col_lo = std::min(box.col_lo, col);
      box.col_hi = std::max(box.col_hi, col);
    }
  }
  for (int row = 0; row < lattice.n_rows; ++row) {
    const double cy = lattice.origin.y + (row + 0.5) * lattice.cell_size;
    if (cy - half >= zone.lo.y - eps && cy + half <= zone.hi.y + eps) {
      box.row_lo = std::min(box.row_lo, row);
      box.row_hi = std::max(box.row_hi, row);
    }
  }
  return box;
}

std::vector<CellIndex> admissible_cells(const LatticeSpec& lattice) {
  const AdmissibleBox box = admissible_box(lattice);
  std::vector<CellIndex> cells;
  if (box.empty()) return cells;
  cells.reserve(static_cast<size_t>(box.cols()) * box.rows());
  for (int row = box.row_lo; row <= box.row_hi; ++row)
    for (int col = box.col_lo; col <= box.col_hi; ++col)
      cells.push_back({col, row});
  return cells;
}

NeighborList neighbors9(CellIndex cell, const LatticeSpec& lattice) {
  NeighborList out;
  for (const auto& off : kNeighborOffsets) {
    const CellIndex c{cell.col + off[0], cell.row + off[1]};
    if (admissible(c, lattice)) out.cells[out.count++] = c;
  }
  return out;
}

}  // namespace patrol
