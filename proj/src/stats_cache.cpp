#include "patrol/stats_cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "patrol/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "cache format assumes a little-endian host");

namespace patrol {

namespace {

constexpr char kMagic[4] = {'P', 'T', 'A', 'B'};
constexpr std::uint32_t kVersion = 1;

void put_u8(std::ostream& out, std::uint8_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

struct Reader {
  std::istream& in;

  void bytes(void* dst, std::size_t n) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (!in) throw ConfigError("stats cache: truncated file");
  }
  std::uint8_t u8() { std::uint8_t v; bytes(&v, sizeof v); return v; }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, sizeof v); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, sizeof v); return v; }
  double f64() { double v; bytes(&v, sizeof v); return v; }
};

void put_cdf(std::ostream& out, const EscapeCdf& cdf) {
  put_u8(out, cdf.empty() ? 0 : 1);
  if (cdf.empty()) return;
  put_f64(out, cdf.t_a);
  put_f64(out, cdf.t_b);
  put_f64(out, cdf.bin_width);
  put_u32(out, static_cast<std::uint32_t>(cdf.cdf_values.size()));
  for (const double v : cdf.cdf_values) put_f64(out, v);
}

EscapeCdf get_cdf(Reader& r) {
  EscapeCdf cdf;
  if (r.u8() == 0) return cdf;
  cdf.t_a = r.f64();
  cdf.t_b = r.f64();
  cdf.bin_width = r.f64();
  const std::uint32_t n = r.u32();
  if (n == 0 || n > (1u << 28))
    throw ConfigError("stats cache: implausible cdf bin count");
  cdf.cdf_values.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) cdf.cdf_values[i] = r.f64();
  return cdf;
}

}  // namespace

void save_stats_cache(std::ostream& out, const StatsTable& table) {
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u64(out, table.fingerprint());
  put_u32(out, static_cast<std::uint32_t>(table.params().quadrature_n));
  put_f64(out, table.params().bin_width);

  const LatticeSpec& lat = table.lattice();
  put_u32(out, static_cast<std::uint32_t>(lat.n_cols));
  put_u32(out, static_cast<std::uint32_t>(lat.n_rows));
  put_f64(out, lat.cell_size);
  put_f64(out, lat.fov_side);
  put_f64(out, lat.origin.x);
  put_f64(out, lat.origin.y);

  const std::uint32_t n_sources =
      table.size() > 0
          ? static_cast<std::uint32_t>(
                table.stats_by_index(0).per_source_rates.size())
          : 0;
  put_u32(out, n_sources);
  put_u32(out, static_cast<std::uint32_t>(table.size()));

  for (std::size_t i = 0; i < table.size(); ++i) {
    const CellIndex c = table.cells()[i];
    const CellStats& cs = table.stats_by_index(i);
    put_u32(out, static_cast<std::uint32_t>(c.col));
    put_u32(out, static_cast<std::uint32_t>(c.row));
    put_f64(out, cs.arrival_rate);
    put_f64(out, cs.expected_escape_time);
    put_f64(out, cs.expected_detections);
    for (std::uint32_t j = 0; j < n_sources; ++j) {
      put_f64(out, cs.per_source_rates[j]);
      put_cdf(out, cs.per_source_cdfs[j]);
    }
  }
  if (!out) throw std::runtime_error("stats cache: write failed");
}

void save_stats_cache(const std::filesystem::path& path,
                      const StatsTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("stats cache: cannot open " + path.string() +
                             " for writing");
  save_stats_cache(out, table);
}

StatsTable load_stats_cache(std::istream& in) {
  Reader r{in};

  char magic[4];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ConfigError("stats cache: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw ConfigError("stats cache: unsupported version " +
                      std::to_string(version));

  const std::uint64_t fingerprint = r.u64();
  StatsParams params;
  params.quadrature_n = static_cast<int>(r.u32());
  params.bin_width = r.f64();

  LatticeSpec lat;
  lat.n_cols = static_cast<int>(r.u32());
  lat.n_rows = static_cast<int>(r.u32());
  lat.cell_size = r.f64();
  lat.fov_side = r.f64();
  lat.origin.x = r.f64();
  lat.origin.y = r.f64();
  if (lat.n_cols <= 0 || lat.n_rows <= 0 || lat.cell_size <= 0.0)
    throw ConfigError("stats cache: implausible lattice header");

  const std::uint32_t n_sources = r.u32();
  const std::uint32_t n_cells = r.u32();
  if (n_cells >
      static_cast<std::uint64_t>(lat.n_cols) * static_cast<std::uint64_t>(lat.n_rows))
    throw ConfigError("stats cache: more cells than the lattice holds");

  std::vector<CellIndex> cells;
  std::vector<CellStats> stats;
  cells.reserve(n_cells);
  stats.reserve(n_cells);
  for (std::uint32_t i = 0; i < n_cells; ++i) {
    CellIndex c;
    c.col = static_cast<int>(r.u32());
    c.row = static_cast<int>(r.u32());
    if (!lat.in_range(c))
      throw ConfigError("stats cache: cell index out of range");
    CellStats cs;
    cs.arrival_rate = r.f64();
    cs.expected_escape_time = r.f64();
    cs.expected_detections = r.f64();
    cs.per_source_rates.resize(n_sources);
    cs.per_source_cdfs.resize(n_sources);
    for (std::uint32_t j = 0; j < n_sources; ++j) {
      cs.per_source_rates[j] = r.f64();
      cs.per_source_cdfs[j] = get_cdf(r);
    }
    cells.push_back(c);
    stats.push_back(std::move(cs));
  }

  return StatsTable(lat, params, fingerprint, std::move(cells),
                    std::move(stats));
}

StatsTable load_stats_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("stats cache: cannot open " + path.string());
  return load_stats_cache(in);
}

}  // namespace patrol
