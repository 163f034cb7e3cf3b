#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace patrol {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator*(Vec2 v, double s) { return {v.x * s, v.y * s}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator+(Point p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }
inline Vec2 operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

/// Axis-aligned rectangle.  Containment is closed: the boundary counts as
/// inside.
struct Rect {
  Point lo;
  Point hi;

  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  Point center() const { return {(lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0}; }

  bool contains(Point p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }

  static Rect centered(Point c, double side) {
    const double h = side / 2.0;
    return {{c.x - h, c.y - h}, {c.x + h, c.y + h}};
  }
};

/// Rectangular surveillance zone; origin is the lower-left corner.
struct ZoneSpec {
  double width = 0.0;
  double height = 0.0;
  Point origin;

  Rect rect() const {
    return {origin, {origin.x + width, origin.y + height}};
  }
};

struct CellIndex {
  int col = 0;
  int row = 0;

  friend bool operator==(CellIndex a, CellIndex b) {
    return a.col == b.col && a.row == b.row;
  }
  friend bool operator!=(CellIndex a, CellIndex b) { return !(a == b); }
};

inline int cheby_distance(CellIndex a, CellIndex b) {
  const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
  const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
  return dc > dr ? dc : dr;
}

/// Uniform square lattice covering the zone exactly.  Sensors sit at cell
/// centers; each carries a square field of view of side fov_side, which is
/// allowed to spill over neighbouring cells (fov_side >= cell_size).
struct LatticeSpec {
  double cell_size = 0.0;
  int n_cols = 0;
  int n_rows = 0;
  double fov_side = 0.0;
  Point origin;  // zone lower-left corner

  bool in_range(CellIndex c) const {
    return c.col >= 0 && c.col < n_cols && c.row >= 0 && c.row < n_rows;
  }

  Point cell_center(CellIndex c) const {
    return {origin.x + (c.col + 0.5) * cell_size,
            origin.y + (c.row + 0.5) * cell_size};
  }

  Rect zone_rect() const {
    return {origin, {origin.x + n_cols * cell_size,
                     origin.y + n_rows * cell_size}};
  }
};

/// Builds the lattice for a zone.  The zone extents must be integer
/// multiples of cell_size and fov_side must be at least cell_size.
LatticeSpec make_lattice(const ZoneSpec& zone, double cell_size,
                         double fov_side);

/// Which half-plane a source launches targets into.  A north-facing source
/// sits below the zone and fires upward, and so on.
enum class Facing { north, south, east, west };

/// Target source on the zone perimeter.  Takeoff angles are measured in the
/// source's own frame: 0 along the half-plane boundary in the positive
/// lattice-axis direction (+x for north/south facings, +y for east/west),
/// pi/2 straight into the zone, pi along the opposite boundary direction.
struct SourceSpec {
  Point position;
  Facing facing = Facing::north;
  double rate = 0.0;  // mean targets per time-step
};

/// Closed angular interval [delta, delta + theta] of takeoff angles whose
/// rays meet some region.  theta == 0 means unreachable.
struct AngularSpan {
  double delta = 0.0;
  double theta = 0.0;
};

/// Unit direction of a takeoff angle in the source frame, in world
/// coordinates.
Vec2 ray_direction(Facing facing, double angle);

/// World offset mapped into the source frame (u along the boundary axis,
/// v into the facing half-plane).
std::pair<double, double> frame_coords(Facing facing, Vec2 d);

/// Span of takeoff angles from the source that intersect the square,
/// clipped to the physical range [0, pi].  Throws std::domain_error if the
/// source lies inside the square.
AngularSpan angular_span(const SourceSpec& source, const Rect& square);

/// Time-steps a target spends inside the square when launched at the given
/// takeoff angle, i.e. chord length divided by speed.  Empty when the ray
/// misses.  Throws std::domain_error for non-positive speed.
std::optional<double> transit_time(const SourceSpec& source,
                                   double takeoff_angle, const Rect& square,
                                   double speed);

/// Field-of-view square of a sensor parked at the given cell.  Throws
/// std::out_of_range for an out-of-range index.
Rect fov_square(CellIndex cell, const LatticeSpec& lattice);

/// Fraction of cell a's FOV square covered by cell b's: for axis offsets
/// (dx, dy) between centers this is max(0, L-|dx|) * max(0, L-|dy|) / L^2.
double overlap_fraction(CellIndex a, CellIndex b, const LatticeSpec& lattice);

/// A cell is admissible when its whole FOV square fits inside the zone.
/// Sensors are confined to admissible cells.
bool admissible(CellIndex cell, const LatticeSpec& lattice);

/// The admissible cells form an axis-aligned box of indices (the FOV-fit
/// test is separable per axis).
struct AdmissibleBox {
  int col_lo = 0;
  int col_hi = -1;  // inclusive
  int row_lo = 0;
  int row_hi = -1;  // inclusive

  bool empty() const { return col_hi < col_lo || row_hi < row_lo; }
  int cols() const { return col_hi - col_lo + 1; }
  int rows() const { return row_hi - row_lo + 1; }
  bool contains(CellIndex c) const {
    return c.col >= col_lo && c.col <= col_hi && c.row >= row_lo &&
           c.row <= row_hi;
  }
};

AdmissibleBox admissible_box(const LatticeSpec& lattice);

/// All admissible cells, row-major.
std::vector<CellIndex> admissible_cells(const LatticeSpec& lattice);

/// Canonical move order: stay, N, NE, E, SE, S, SW, W, NW.  Planning and
/// tie-breaking depend on this order.
inline constexpr int kNeighborOffsets[9][2] = {
    {0, 0},  {0, 1},  {1, 1},   {1, 0},  {1, -1},
    {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};

/// Cell plus its eight-connected neighbours, filtered to admissible cells,
/// in the canonical move order.
struct NeighborList {
  std::array<CellIndex, 9> cells{};
  int count = 0;

  const CellIndex* begin() const { return cells.data(); }
  const CellIndex* end() const { return cells.data() + count; }
  CellIndex operator[](int i) const { return cells[static_cast<size_t>(i)]; }
};

NeighborList neighbors9(CellIndex cell, const LatticeSpec& lattice);

/// Parameter interval [t_enter, t_exit] of the forward ray inside the
/// rectangle (t_enter clamped to 0).  Empty when the ray misses.
std::optional<std::pair<double, double>> ray_rect_span(Point origin, Vec2 dir,
                                                       const Rect& rect);

inline bool ray_hits_rect(Point origin, Vec2 dir, const Rect& rect) {
  return ray_rect_span(origin, dir, rect).has_value();
}

}  // namespace patrol
