#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "patrol/errors.hpp"
#include "patrol/lattice_stats.hpp"
#include "patrol/rng.hpp"
#include "patrol/stats_cache.hpp"

using namespace patrol;

namespace {

constexpr double kPi = std::numbers::pi;

LatticeSpec small_lattice() {
  // Matches scenarios/small.json geometry: admissible box is 4..15 squared.
  return make_lattice({200.0, 200.0, {0.0, 0.0}}, 10.0, 80.0);
}

std::vector<SourceSpec> four_sources(double rate = 0.3) {
  return {{{100.0, -5.0}, Facing::north, rate},
          {{100.0, 205.0}, Facing::south, rate},
          {{-5.0, 100.0}, Facing::east, rate},
          {{205.0, 100.0}, Facing::west, rate}};
}

EscapeCdf hand_cdf() {
  EscapeCdf cdf;
  cdf.t_a = 1.0;
  cdf.t_b = 2.0;
  cdf.bin_width = 0.4;
  cdf.cdf_values = {0.25, 0.75, 1.0};  // edges at 1.4, 1.8, 2.0
  return cdf;
}

std::string cache_bytes(const StatsTable& table) {
  std::ostringstream out(std::ios::binary);
  save_stats_cache(out, table);
  return out.str();
}

}  // namespace

TEST_CASE("EscapeCdf edges, interpolation, and mean") {
  const EscapeCdf cdf = hand_cdf();
  CHECK(cdf.bin_count() == 3);
  CHECK(cdf.edge(0) == doctest::Approx(1.4));
  CHECK(cdf.edge(1) == doctest::Approx(1.8));
  // The final edge is t_b exactly even though the nominal width would
  // overshoot to 2.2.
  CHECK(cdf.edge(2) == 2.0);

  CHECK(escape_probability(cdf, 0.0) == 0.0);
  CHECK(escape_probability(cdf, 0.999) == 0.0);
  CHECK(escape_probability(cdf, 1.2) == doctest::Approx(0.125));
  CHECK(escape_probability(cdf, 1.4) == doctest::Approx(0.25));
  CHECK(escape_probability(cdf, 1.6) == doctest::Approx(0.5));
  // Interpolation inside the shortened last bin uses its true width 0.2.
  CHECK(escape_probability(cdf, 1.9) == doctest::Approx(0.875));
  CHECK(escape_probability(cdf, 2.0) == 1.0);
  CHECK(escape_probability(cdf, 50.0) == 1.0);

  CHECK(cdf.mean() == doctest::Approx(0.25 * 1.2 + 0.5 * 1.6 + 0.25 * 1.9));

  CHECK_THROWS_AS(escape_probability(cdf, -0.1), std::domain_error);
  CHECK_THROWS_AS(escape_probability(EscapeCdf{}, 1.0), std::domain_error);
}

TEST_CASE("build_escape_cdf contract") {
  const LatticeSpec lat = small_lattice();
  const SourceSpec src{{100.0, -5.0}, Facing::north, 0.3};
  const CellIndex cell{9, 9};

  const EscapeCdf cdf = build_escape_cdf(src, cell, lat, 10.0, 1024, 0.1);
  REQUIRE_FALSE(cdf.empty());
  CHECK(cdf.t_a > 0.0);
  CHECK(cdf.t_b >= cdf.t_a);
  CHECK(cdf.bin_width == 0.1);
  // The slowest chord through an 80-unit square at speed 10 cannot exceed
  // the diagonal.
  CHECK(cdf.t_b <= 8.0 * std::sqrt(2.0) + 1e-9);

  double prev = 0.0;
  for (int i = 0; i < cdf.bin_count(); ++i) {
    const double v = cdf.cdf_values[static_cast<size_t>(i)];
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    prev = v;
    if (i + 1 < cdf.bin_count())
      CHECK(cdf.edge(i) == doctest::Approx(cdf.t_a + (i + 1) * 0.1));
  }
  CHECK(cdf.cdf_values.back() == 1.0);
  CHECK(cdf.edge(cdf.bin_count() - 1) == cdf.t_b);

  CHECK(escape_probability(cdf, cdf.t_a * 0.5) == 0.0);
  CHECK(escape_probability(cdf, cdf.t_b) == 1.0);
  const double m = cdf.mean();
  CHECK(m >= cdf.t_a);
  CHECK(m <= cdf.t_b);

  CHECK_THROWS_AS(build_escape_cdf(src, cell, lat, 10.0, 1, 0.1),
                  std::domain_error);
  CHECK_THROWS_AS(build_escape_cdf(src, cell, lat, 10.0, 1024, 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(build_escape_cdf(src, cell, lat, 10.0, 1024, -0.5),
                  std::domain_error);

  // A source facing away from the cell cannot reach it.
  const SourceSpec away{{100.0, 300.0}, Facing::north, 0.3};
  CHECK_THROWS_AS(build_escape_cdf(away, cell, lat, 10.0, 1024, 0.1),
                  std::domain_error);
}

TEST_CASE("degenerate span collapses to a single bin") {
  // A source a million units away sees the FOV square under a tiny angle,
  // so every sampled chord is the straight 80-unit crossing.
  const LatticeSpec lat = small_lattice();
  const SourceSpec far{{95.0, -1.0e6}, Facing::north, 0.3};
  const EscapeCdf cdf = build_escape_cdf(far, {9, 9}, lat, 10.0, 512, 0.1);
  CHECK(cdf.bin_count() == 1);
  CHECK(cdf.cdf_values[0] == 1.0);
  CHECK(cdf.t_a == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(cdf.t_b == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(cdf.mean() == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(escape_probability(cdf, 7.9) == 0.0);
  CHECK(escape_probability(cdf, 8.1) == 1.0);
}

TEST_CASE("quadrature CDF tracks a Monte Carlo oracle") {
  const LatticeSpec lat = small_lattice();
  const SourceSpec src{{100.0, -5.0}, Facing::north, 0.3};
  const CellIndex cell{6, 11};
  const double speed = 10.0;

  const EscapeCdf cdf = build_escape_cdf(src, cell, lat, speed, 2048, 0.1);
  const AngularSpan span = angular_span(src, fov_square(cell, lat));
  REQUIRE(span.theta > 0.0);

  Rng rng(987654321);
  std::vector<double> samples;
  const int n = 20000;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = span.delta + span.theta * rng.next_double();
    if (const auto te = transit_time(src, a, fov_square(cell, lat), speed))
      samples.push_back(*te);
  }
  REQUIRE(static_cast<int>(samples.size()) > n * 9 / 10);
  std::sort(samples.begin(), samples.end());

  const auto empirical = [&](double tau) {
    return static_cast<double>(std::lower_bound(samples.begin(), samples.end(),
                                                tau) -
                               samples.begin()) /
           static_cast<double>(samples.size());
  };

  // At its bin edges the quadrature CDF is a direct estimate, so the two
  // must agree up to sampling noise.
  double sup_edges = std::abs(empirical(cdf.t_a) - 0.0);
  for (int i = 0; i < cdf.bin_count(); ++i) {
    const double e = cdf.edge(i);
    sup_edges = std::max(
        sup_edges, std::abs(empirical(e) - escape_probability(cdf, e)));
  }
  CHECK(sup_edges <= 0.02);

  // Between edges the CDF interpolates linearly, so the gap to the true
  // distribution is bounded by the mass of the containing bin.
  for (int i = 0; i < cdf.bin_count(); ++i) {
    const double lo = i == 0 ? cdf.t_a : cdf.edge(i - 1);
    const double hi = cdf.edge(i);
    const double mass = cdf.cdf_values[static_cast<size_t>(i)] -
                        (i == 0 ? 0.0 : cdf.cdf_values[static_cast<size_t>(i - 1)]);
    for (int k = 1; k < 8; ++k) {
      const double tau = lo + (hi - lo) * k / 8.0;
      CHECK(std::abs(empirical(tau) - escape_probability(cdf, tau)) <=
            mass + 0.02);
    }
  }
}

TEST_CASE("per_source_rate is the angular fraction of the source rate") {
  const LatticeSpec lat = small_lattice();
  const SourceSpec src{{100.0, -5.0}, Facing::north, 0.3};
  for (const CellIndex cell : {CellIndex{4, 4}, CellIndex{9, 9}, CellIndex{15, 15}}) {
    const AngularSpan span = angular_span(src, fov_square(cell, lat));
    CHECK(per_source_rate(src, cell, lat) == src.rate * span.theta / kPi);
  }

  // Facing away: zero.
  const SourceSpec away{{100.0, 300.0}, Facing::north, 0.3};
  CHECK(per_source_rate(away, {9, 9}, lat) == 0.0);

  // Zero-rate source contributes nothing regardless of geometry.
  const SourceSpec silent{{100.0, -5.0}, Facing::north, 0.0};
  CHECK(per_source_rate(silent, {9, 9}, lat) == 0.0);

  // Closer cells subtend wider angles.
  CHECK(per_source_rate(src, {9, 4}, lat) > per_source_rate(src, {9, 15}, lat));
}

TEST_CASE("compute_cell_stats weights dwell by arrival share") {
  const LatticeSpec lat = small_lattice();
  const std::vector<SourceSpec> sources = four_sources();
  const StatsParams params{512, 0.1};
  const CellIndex cell{7, 12};

  const CellStats cs = compute_cell_stats(cell, sources, lat, 10.0, params);
  REQUIRE(cs.per_source_rates.size() == 4);
  REQUIRE(cs.per_source_cdfs.size() == 4);

  double rate_sum = 0.0;
  for (const double r : cs.per_source_rates) rate_sum += r;
  CHECK(cs.arrival_rate == rate_sum);

  double te = 0.0;
  double lo = 1e300, hi = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    REQUIRE_FALSE(cs.per_source_cdfs[j].empty());
    const double m = cs.per_source_cdfs[j].mean();
    te += (cs.per_source_rates[j] / cs.arrival_rate) * m;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  CHECK(cs.expected_escape_time == te);
  CHECK(cs.expected_escape_time >= lo);
  CHECK(cs.expected_escape_time <= hi);
  CHECK(cs.expected_detections == cs.arrival_rate * cs.expected_escape_time);

  // An unreachable source occupies its slot with a zero rate and empty CDF.
  std::vector<SourceSpec> with_dud = sources;
  with_dud.push_back({{100.0, 500.0}, Facing::north, 0.3});
  const CellStats dud = compute_cell_stats(cell, with_dud, lat, 10.0, params);
  CHECK(dud.per_source_rates.back() == 0.0);
  CHECK(dud.per_source_cdfs.back().empty());
  CHECK(dud.arrival_rate == doctest::Approx(cs.arrival_rate));

  // No sources at all: everything zero.
  const CellStats empty = compute_cell_stats(cell, {}, lat, 10.0, params);
  CHECK(empty.arrival_rate == 0.0);
  CHECK(empty.expected_escape_time == 0.0);
  CHECK(empty.expected_detections == 0.0);
}

TEST_CASE("mirror-symmetric sources produce mirror-symmetric stats") {
  const LatticeSpec lat = small_lattice();
  const std::vector<SourceSpec> sources = {{{60.0, -5.0}, Facing::north, 0.3},
                                           {{140.0, -5.0}, Facing::north, 0.3}};
  const StatsParams params{512, 0.1};

  for (const CellIndex cell : {CellIndex{4, 6}, CellIndex{8, 10}, CellIndex{5, 14}}) {
    const CellIndex mirror{19 - cell.col, cell.row};
    const CellStats a = compute_cell_stats(cell, sources, lat, 10.0, params);
    const CellStats b = compute_cell_stats(mirror, sources, lat, 10.0, params);
    // Source 0 against the cell is congruent to source 1 against its mirror.
    CHECK(a.per_source_rates[0] == doctest::Approx(b.per_source_rates[1]).epsilon(1e-12));
    CHECK(a.per_source_rates[1] == doctest::Approx(b.per_source_rates[0]).epsilon(1e-12));
    CHECK(a.arrival_rate == doctest::Approx(b.arrival_rate).epsilon(1e-12));
    // Quadrature samples of mirrored spans can fall into different bins, so
    // dwell agreement is looser than rate agreement.
    CHECK(a.expected_escape_time ==
          doctest::Approx(b.expected_escape_time).epsilon(1e-3));
    CHECK(a.expected_detections ==
          doctest::Approx(b.expected_detections).epsilon(1e-3));
  }
}

TEST_CASE("precompute_all covers the admissible box deterministically") {
  const LatticeSpec lat = small_lattice();
  const std::vector<SourceSpec> sources = four_sources();
  const StatsParams params{256, 0.1};

  const StatsTable table = precompute_all(lat, sources, 10.0, params);
  CHECK(table.size() == 144);
  CHECK(table.params() == params);
  CHECK(table.fingerprint() == scenario_fingerprint(lat, sources, 10.0));

  // Row-major admissible cells.
  const std::vector<CellIndex> cells = admissible_cells(lat);
  REQUIRE(table.cells().size() == cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    CHECK((table.cells()[i] == cells[i]));

  CHECK(table.contains({4, 4}));
  CHECK(table.contains({15, 15}));
  CHECK_FALSE(table.contains({3, 4}));
  CHECK_FALSE(table.contains({-1, 2}));
  CHECK_THROWS_AS(table.at({0, 0}), std::out_of_range);
  CHECK_THROWS_AS(table.at({40, 40}), std::out_of_range);

  // at() and stats_by_index agree.
  const CellStats& via_at = table.at({9, 9});
  bool found = false;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.cells()[i] == CellIndex{9, 9}) {
      CHECK(&table.stats_by_index(i) == &via_at);
      found = true;
    }
  }
  CHECK(found);

  // Repeated precomputation is bit-identical.
  const StatsTable again = precompute_all(lat, sources, 10.0, params);
  CHECK(cache_bytes(table) == cache_bytes(again));

  // Matches the single-cell computation exactly.
  const CellStats direct = compute_cell_stats({9, 9}, sources, lat, 10.0, params);
  CHECK(via_at.arrival_rate == direct.arrival_rate);
  CHECK(via_at.expected_escape_time == direct.expected_escape_time);
  CHECK(via_at.expected_detections == direct.expected_detections);

  // A lattice with no admissible cells is a configuration error.
  const LatticeSpec none = make_lattice({100.0, 100.0, {}}, 10.0, 120.0);
  CHECK_THROWS_AS(precompute_all(none, sources, 10.0, params), ConfigError);
}

TEST_CASE("expected detections peak near the sources") {
  const LatticeSpec lat = small_lattice();
  const StatsTable table =
      precompute_all(lat, four_sources(), 10.0, {256, 0.1});

  // Cells in front of the north source outscore the zone center: arrivals
  // are denser where the subtended angles are widest.
  const double near_north = table.at({9, 4}).expected_detections;
  const double center = table.at({9, 9}).expected_detections;
  CHECK(near_north > center);

  // Every admissible cell sees traffic in this scenario.
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(table.stats_by_index(i).arrival_rate > 0.0);
    CHECK(table.stats_by_index(i).expected_detections > 0.0);
  }
}

TEST_CASE("scenario fingerprint sensitivity") {
  const LatticeSpec lat = small_lattice();
  const std::vector<SourceSpec> sources = four_sources();

  const std::uint64_t base = scenario_fingerprint(lat, sources, 10.0);
  CHECK(base == scenario_fingerprint(lat, sources, 10.0));

  CHECK(base != scenario_fingerprint(lat, sources, 15.0));

  std::vector<SourceSpec> moved = sources;
  moved[0].position.x += 1.0;
  CHECK(base != scenario_fingerprint(lat, moved, 10.0));

  std::vector<SourceSpec> rerated = sources;
  rerated[2].rate = 0.4;
  CHECK(base != scenario_fingerprint(lat, rerated, 10.0));

  std::vector<SourceSpec> swapped = sources;
  std::swap(swapped[0], swapped[1]);
  CHECK(base != scenario_fingerprint(lat, swapped, 10.0));

  LatticeSpec wider = lat;
  wider.fov_side = 90.0;
  CHECK(base != scenario_fingerprint(wider, sources, 10.0));

  std::vector<SourceSpec> fewer(sources.begin(), sources.end() - 1);
  CHECK(base != scenario_fingerprint(lat, fewer, 10.0));
}

TEST_CASE("stats cache round-trips byte-exactly") {
  const LatticeSpec lat = small_lattice();
  const StatsTable table =
      precompute_all(lat, four_sources(), 10.0, {128, 0.1});

  const std::string bytes = cache_bytes(table);
  std::istringstream in(bytes, std::ios::binary);
  const StatsTable loaded = load_stats_cache(in);

  CHECK(loaded.fingerprint() == table.fingerprint());
  CHECK(loaded.params() == table.params());
  CHECK(loaded.size() == table.size());
  CHECK(loaded.lattice().n_cols == lat.n_cols);
  CHECK(loaded.lattice().fov_side == lat.fov_side);
  CHECK(cache_bytes(loaded) == bytes);

  // Loaded tables answer queries identically.
  const CellStats& a = table.at({9, 9});
  const CellStats& b = loaded.at({9, 9});
  CHECK(a.expected_detections == b.expected_detections);
  CHECK(a.per_source_cdfs[0].cdf_values == b.per_source_cdfs[0].cdf_values);
}

TEST_CASE("stats cache rejects malformed data") {
  const LatticeSpec lat = small_lattice();
  const StatsTable table =
      precompute_all(lat, four_sources(), 10.0, {128, 0.1});
  const std::string bytes = cache_bytes(table);

  // Truncation anywhere in the stream is detected.
  for (const std::size_t keep :
       {std::size_t{0}, std::size_t{3}, std::size_t{10}, bytes.size() / 2,
        bytes.size() - 1}) {
    std::istringstream in(bytes.substr(0, keep), std::ios::binary);
    CHECK_THROWS_AS(load_stats_cache(in), ConfigError);
  }

  // Corrupted magic.
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream m(bad_magic, std::ios::binary);
  CHECK_THROWS_AS(load_stats_cache(m), ConfigError);

  // Unsupported version.
  std::string bad_version = bytes;
  bad_version[4] = 99;
  std::istringstream v(bad_version, std::ios::binary);
  CHECK_THROWS_AS(load_stats_cache(v), ConfigError);

  CHECK_THROWS_AS(load_stats_cache("/nonexistent/path.ptab"), ConfigError);
}
