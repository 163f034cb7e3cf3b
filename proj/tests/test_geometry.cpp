#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <utility>

#include "patrol/geometry.hpp"
#include "patrol/rng.hpp"

using namespace patrol;

namespace {

constexpr double kPi = std::numbers::pi;

LatticeSpec small_lattice() {
  // 10x10 cells of size 10, FOV 20: admissible box is cols/rows 1..8.
  return make_lattice({100.0, 100.0, {0.0, 0.0}}, 10.0, 20.0);
}

}  // namespace

TEST_CASE("make_lattice dimensions and validation") {
  const ZoneSpec zone{570.0, 440.0, {0.0, 0.0}};
  const LatticeSpec lat = make_lattice(zone, 10.0, 80.0);
  CHECK(lat.n_cols == 57);
  CHECK(lat.n_rows == 44);
  CHECK(lat.cell_size == 10.0);
  CHECK(lat.fov_side == 80.0);
  CHECK(lat.origin.x == 0.0);
  CHECK(lat.cell_center({0, 0}).x == doctest::Approx(5.0));
  CHECK(lat.cell_center({0, 0}).y == doctest::Approx(5.0));
  CHECK(lat.cell_center({56, 43}).x == doctest::Approx(565.0));
  CHECK(lat.zone_rect().hi.x == doctest::Approx(570.0));
  CHECK(lat.zone_rect().hi.y == doctest::Approx(440.0));

  CHECK(lat.in_range({0, 0}));
  CHECK(lat.in_range({56, 43}));
  CHECK_FALSE(lat.in_range({57, 0}));
  CHECK_FALSE(lat.in_range({0, -1}));

  CHECK_THROWS_AS(make_lattice({105.0, 100.0, {}}, 10.0, 20.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_lattice({100.0, 100.0, {}}, 10.0, 5.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_lattice({0.0, 100.0, {}}, 10.0, 20.0),
                  std::invalid_argument);

  // Offset origin shifts everything rigidly.
  const LatticeSpec shifted =
      make_lattice({100.0, 100.0, {50.0, -30.0}}, 10.0, 20.0);
  CHECK(shifted.cell_center({0, 0}).x == doctest::Approx(55.0));
  CHECK(shifted.cell_center({0, 0}).y == doctest::Approx(-25.0));
}

TEST_CASE("ray_direction spans the facing half-plane") {
  // angle 0 points along the boundary axis, pi/2 straight into the zone.
  const Vec2 n0 = ray_direction(Facing::north, 0.0);
  CHECK(n0.x == doctest::Approx(1.0));
  CHECK(n0.y == doctest::Approx(0.0));
  const Vec2 n90 = ray_direction(Facing::north, kPi / 2);
  CHECK(n90.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(n90.y == doctest::Approx(1.0));

  const Vec2 s90 = ray_direction(Facing::south, kPi / 2);
  CHECK(s90.y == doctest::Approx(-1.0));
  const Vec2 e90 = ray_direction(Facing::east, kPi / 2);
  CHECK(e90.x == doctest::Approx(1.0));
  const Vec2 w90 = ray_direction(Facing::west, kPi / 2);
  CHECK(w90.x == doctest::Approx(-1.0));

  // angle 0 runs along +x for north/south and +y for east/west.
  CHECK(ray_direction(Facing::south, 0.0).x == doctest::Approx(1.0));
  CHECK(ray_direction(Facing::east, 0.0).y == doctest::Approx(1.0));
  CHECK(ray_direction(Facing::west, 0.0).y == doctest::Approx(1.0));

  for (const Facing f :
       {Facing::north, Facing::south, Facing::east, Facing::west}) {
    for (int k = 0; k <= 16; ++k) {
      const double a = k * kPi / 16;
      const Vec2 d = ray_direction(f, a);
      CHECK(std::hypot(d.x, d.y) == doctest::Approx(1.0));
      // frame_coords is the inverse map back to the source frame.
      const auto [u, w] = frame_coords(f, d);
      CHECK(u == doctest::Approx(std::cos(a)));
      CHECK(w == doctest::Approx(std::sin(a)));
    }
  }
}

TEST_CASE("angular_span worked example") {
  const SourceSpec src{{0.0, 0.0}, Facing::north, 0.3};
  // Square with vertices (+-1, 9) and (+-1, 11) straight above the source.
  const Rect square{{-1.0, 9.0}, {1.0, 11.0}};
  const AngularSpan span = angular_span(src, square);
  CHECK(span.delta == doctest::Approx(std::atan2(9.0, 1.0)).epsilon(1e-14));
  CHECK(span.theta ==
        doctest::Approx(kPi - 2.0 * std::atan2(9.0, 1.0)).epsilon(1e-12));
  // Symmetric square about the vertical: span symmetric about pi/2.
  CHECK(span.delta + span.theta / 2 == doctest::Approx(kPi / 2).epsilon(1e-14));
}

TEST_CASE("angular_span clipping, wrap, and unreachable cases") {
  const SourceSpec src{{0.0, 0.0}, Facing::north, 0.3};

  // Entirely behind the half-plane boundary: unreachable.
  CHECK(angular_span(src, {{-1.0, -11.0}, {1.0, -9.0}}).theta == 0.0);

  // Straddles the forward boundary axis (angle 0): clipped at 0.
  const AngularSpan fwd = angular_span(src, {{9.0, -1.0}, {11.0, 1.0}});
  CHECK(fwd.delta == 0.0);
  CHECK(fwd.theta == doctest::Approx(std::atan2(1.0, 9.0)).epsilon(1e-12));

  // Straddles the backward axis (angle pi): the forward arc runs from the
  // near top corner to pi.
  const AngularSpan back = angular_span(src, {{-11.0, -1.0}, {-9.0, 1.0}});
  CHECK(back.delta == doctest::Approx(kPi - std::atan2(1.0, 9.0)).epsilon(1e-12));
  CHECK(back.theta == doctest::Approx(std::atan2(1.0, 9.0)).epsilon(1e-12));

  // Source inside the square is a domain error.
  CHECK_THROWS_AS(angular_span(src, {{-1.0, -1.0}, {1.0, 1.0}}),
                  std::domain_error);
}

TEST_CASE("angular_span matches ray casting over a deterministic sweep") {
  const SourceSpec src{{20.0, -10.0}, Facing::north, 0.3};
  const Rect square{{30.0, 50.0}, {110.0, 130.0}};
  const AngularSpan span = angular_span(src, square);
  REQUIRE(span.theta > 0.0);

  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const double a = (k + 0.5) * kPi / 2000;
    // Skip the knife edge at the tangent rays.
    if (std::abs(a - span.delta) < 1e-9 ||
        std::abs(a - (span.delta + span.theta)) < 1e-9)
      continue;
    const bool inside = a > span.delta && a < span.delta + span.theta;
    const bool hit =
        ray_hits_rect(src.position, ray_direction(src.facing, a), square);
    CHECK(hit == inside);
    ++checked;
  }
  CHECK(checked >= 1998);
}

TEST_CASE("angular_span is facing-symmetric") {
  // Congruent configurations in all four frames produce identical spans.
  const Rect north_sq{{30.0, 60.0}, {50.0, 100.0}};
  const Rect south_sq{{30.0, -100.0}, {50.0, -60.0}};
  const Rect east_sq{{60.0, 30.0}, {100.0, 50.0}};
  const Rect west_sq{{-100.0, 30.0}, {-60.0, 50.0}};
  const Point at{0.0, 0.0};

  const AngularSpan n = angular_span({at, Facing::north, 1.0}, north_sq);
  const AngularSpan s = angular_span({at, Facing::south, 1.0}, south_sq);
  const AngularSpan e = angular_span({at, Facing::east, 1.0}, east_sq);
  const AngularSpan w = angular_span({at, Facing::west, 1.0}, west_sq);
  CHECK(n.delta == s.delta);
  CHECK(n.theta == s.theta);
  CHECK(n.delta == e.delta);
  CHECK(n.theta == e.theta);
  CHECK(n.delta == w.delta);
  CHECK(n.theta == w.theta);
}

TEST_CASE("uniform takeoff angles hit with probability theta over pi") {
  const SourceSpec src{{100.0, -5.0}, Facing::north, 0.3};
  const Rect square{{40.0, 50.0}, {120.0, 130.0}};
  const AngularSpan span = angular_span(src, square);

  Rng rng(20240816);
  const int n = 20000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double a = kPi * rng.next_double();
    if (ray_hits_rect(src.position, ray_direction(src.facing, a), square))
      ++hits;
  }
  const double p = span.theta / kPi;
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(hits) / n - p) < 4.0 * sigma);
}

TEST_CASE("ray_rect_span clamps the entry to the ray origin") {
  const Rect rect{{0.0, 0.0}, {10.0, 10.0}};

  // Origin inside: the span starts at 0.
  const auto inside = ray_rect_span({5.0, 5.0}, {1.0, 0.0}, rect);
  REQUIRE(inside.has_value());
  CHECK(inside->first == 0.0);
  CHECK(inside->second == doctest::Approx(5.0));

  // Origin outside pointing in.
  const auto in = ray_rect_span({-10.0, 5.0}, {1.0, 0.0}, rect);
  REQUIRE(in.has_value());
  CHECK(in->first == doctest::Approx(10.0));
  CHECK(in->second == doctest::Approx(20.0));

  // Pointing away misses.
  CHECK_FALSE(ray_rect_span({-10.0, 5.0}, {-1.0, 0.0}, rect).has_value());
  // Axis-parallel ray outside the slab misses.
  CHECK_FALSE(ray_rect_span({-10.0, 20.0}, {1.0, 0.0}, rect).has_value());
  // Axis-parallel ray on the boundary grazes: closed containment.
  CHECK(ray_rect_span({-10.0, 10.0}, {1.0, 0.0}, rect).has_value());
}

TEST_CASE("transit_time measures the chord in time-steps") {
  const SourceSpec src{{0.0, 0.0}, Facing::north, 0.3};

  // Straight up through an 80-unit square: chord 80, speed 10 -> 8 steps.
  const Rect above{{-40.0, 100.0}, {40.0, 180.0}};
  const auto straight = transit_time(src, kPi / 2, above, 10.0);
  REQUIRE(straight.has_value());
  CHECK(*straight == doctest::Approx(8.0).epsilon(1e-12));

  // Diagonal at 45 degrees through a square whose corners sit on the ray:
  // chord 80*sqrt(2).
  const Rect diag{{10.0, 10.0}, {90.0, 90.0}};
  const auto d = transit_time(src, kPi / 4, diag, 10.0);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(8.0 * std::sqrt(2.0)).epsilon(1e-12));

  // Doubling the speed halves the transit.
  CHECK(*transit_time(src, kPi / 4, diag, 20.0) ==
        doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-12));

  // A ray that misses has no transit.
  CHECK_FALSE(transit_time(src, 0.0, diag, 10.0).has_value());

  CHECK_THROWS_AS(transit_time(src, kPi / 2, above, 0.0), std::domain_error);
  CHECK_THROWS_AS(transit_time(src, kPi / 2, above, -1.0), std::domain_error);
}

TEST_CASE("fov_square spills over neighbouring cells") {
  const LatticeSpec lat = small_lattice();
  const Rect fov = fov_square({0, 0}, lat);
  CHECK(fov.lo.x == doctest::Approx(-5.0));
  CHECK(fov.lo.y == doctest::Approx(-5.0));
  CHECK(fov.hi.x == doctest::Approx(15.0));
  CHECK(fov.hi.y == doctest::Approx(15.0));

  const Rect mid = fov_square({4, 7}, lat);
  CHECK(mid.center().x == doctest::Approx(45.0));
  CHECK(mid.center().y == doctest::Approx(75.0));
  CHECK(mid.width() == doctest::Approx(20.0));

  CHECK_THROWS_AS(fov_square({-1, 0}, lat), std::out_of_range);
  CHECK_THROWS_AS(fov_square({10, 0}, lat), std::out_of_range);
}

TEST_CASE("overlap_fraction closed form") {
  // fov 80, cell 10: shifting one cell strips a 10-wide band.
  const LatticeSpec lat = make_lattice({200.0, 200.0, {}}, 10.0, 80.0);
  CHECK(overlap_fraction({5, 5}, {5, 5}, lat) == 1.0);
  CHECK(overlap_fraction({5, 5}, {6, 5}, lat) == doctest::Approx(0.875));
  CHECK(overlap_fraction({5, 5}, {5, 6}, lat) == doctest::Approx(0.875));
  CHECK(overlap_fraction({5, 5}, {9, 9}, lat) == doctest::Approx(0.25));
  CHECK(overlap_fraction({5, 5}, {13, 5}, lat) == 0.0);
  CHECK(overlap_fraction({5, 5}, {19, 19}, lat) == 0.0);

  // Independent oracle: intersection area of the two FOV rectangles.
  for (int dc = -9; dc <= 9; ++dc) {
    for (int dr = -9; dr <= 9; ++dr) {
      const CellIndex a{9, 9};
      const CellIndex b{9 + dc, 9 + dr};
      const Rect ra = fov_square(a, lat);
      const Rect rb = fov_square(b, lat);
      const double ox =
          std::max(0.0, std::min(ra.hi.x, rb.hi.x) - std::max(ra.lo.x, rb.lo.x));
      const double oy =
          std::max(0.0, std::min(ra.hi.y, rb.hi.y) - std::max(ra.lo.y, rb.lo.y));
      const double want = ox * oy / (lat.fov_side * lat.fov_side);
      CHECK(overlap_fraction(a, b, lat) == doctest::Approx(want).epsilon(1e-12));
      // Symmetry.
      CHECK(overlap_fraction(a, b, lat) == overlap_fraction(b, a, lat));
    }
  }

  CHECK_THROWS_AS(overlap_fraction({0, 0}, {40, 0}, lat), std::out_of_range);
}

TEST_CASE("admissible cells form the interior box") {
  const LatticeSpec lat = small_lattice();
  // FOV half-side 10: centers must sit at least 10 from every zone edge.
  CHECK_FALSE(admissible({0, 5}, lat));
  CHECK_FALSE(admissible({5, 0}, lat));
  CHECK_FALSE(admissible({9, 5}, lat));
  CHECK(admissible({1, 1}, lat));
  CHECK(admissible({8, 8}, lat));
  CHECK_FALSE(admissible({-1, 4}, lat));
  CHECK_FALSE(admissible({4, 10}, lat));

  const AdmissibleBox box = admissible_box(lat);
  CHECK(box.col_lo == 1);
  CHECK(box.col_hi == 8);
  CHECK(box.row_lo == 1);
  CHECK(box.row_hi == 8);
  CHECK(box.cols() == 8);
  CHECK(box.rows() == 8);
  CHECK_FALSE(box.empty());
  CHECK(box.contains({1, 8}));
  CHECK_FALSE(box.contains({0, 8}));

  const std::vector<CellIndex> cells = admissible_cells(lat);
  REQUIRE(cells.size() == 64);
  // Row-major enumeration.
  CHECK((cells.front() == CellIndex{1, 1}));
  CHECK((cells[1] == CellIndex{2, 1}));
  CHECK((cells.back() == CellIndex{8, 8}));
  for (const CellIndex c : cells) CHECK(admissible(c, lat));

  // FOV touching the zone boundary exactly is still admissible.
  const LatticeSpec tight = make_lattice({100.0, 100.0, {}}, 10.0, 90.0);
  CHECK(admissible({4, 4}, tight));
  CHECK(admissible({5, 5}, tight));
  CHECK_FALSE(admissible({3, 4}, tight));
  const AdmissibleBox tb = admissible_box(tight);
  CHECK(tb.col_lo == 4);
  CHECK(tb.col_hi == 5);

  // FOV wider than the zone leaves no admissible cell.
  const LatticeSpec none = make_lattice({100.0, 100.0, {}}, 10.0, 120.0);
  CHECK(admissible_box(none).empty());
  CHECK(admissible_cells(none).empty());
}

TEST_CASE("neighbors9 keeps the canonical move order") {
  const LatticeSpec lat = small_lattice();

  // Interior cell: all nine moves, in order stay, N, NE, E, SE, S, SW, W, NW.
  const NeighborList mid = neighbors9({4, 4}, lat);
  REQUIRE(mid.count == 9);
  const CellIndex want[9] = {{4, 4}, {4, 5}, {5, 5}, {5, 4}, {5, 3},
                             {4, 3}, {3, 3}, {3, 4}, {3, 5}};
  for (int i = 0; i < 9; ++i) CHECK(mid[i] == want[i]);

  // Box corner: inadmissible moves are filtered, order preserved.
  const NeighborList corner = neighbors9({1, 1}, lat);
  REQUIRE(corner.count == 4);
  CHECK((corner[0] == CellIndex{1, 1}));
  CHECK((corner[1] == CellIndex{1, 2}));
  CHECK((corner[2] == CellIndex{2, 2}));
  CHECK((corner[3] == CellIndex{2, 1}));

  // Box edge.
  const NeighborList edge = neighbors9({4, 1}, lat);
  REQUIRE(edge.count == 6);
  CHECK((edge[0] == CellIndex{4, 1}));

  // The stay move is always first when the cell itself is admissible.
  for (const CellIndex c : admissible_cells(lat))
    CHECK(neighbors9(c, lat)[0] == c);
}

TEST_CASE("cheby_distance") {
  CHECK(cheby_distance({0, 0}, {0, 0}) == 0);
  CHECK(cheby_distance({0, 0}, {1, 1}) == 1);
  CHECK(cheby_distance({2, 3}, {5, 1}) == 3);
  CHECK(cheby_distance({5, 1}, {2, 3}) == 3);
  CHECK(cheby_distance({-2, 0}, {2, -1}) == 4);
}
