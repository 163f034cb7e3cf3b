#include "patrol/spawn_stream.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "patrol/errors.hpp"
#include "patrol/hash.hpp"

static_assert(std::endian::native == std::endian::little,
              "stream format assumes a little-endian host");

namespace patrol {

namespace {

constexpr char kMagic[4] = {'P', 'S', 'P', 'N'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::uint64_t spawn_stream_checksum(const std::vector<SpawnEvent>& events) {
  Fnv1a h;
  for (const SpawnEvent& e : events) {
    h.update_i32(e.step);
    h.update_i32(e.source);
    h.update_f64(e.angle);
    h.update_f64(e.speed);
  }
  return h.value();
}

void save_spawn_stream(std::ostream& out, std::uint64_t scenario_fingerprint,
                       std::uint64_t seed,
                       const std::vector<SpawnEvent>& events) {
  out.write(kMagic, sizeof kMagic);
  const std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&scenario_fingerprint),
            sizeof scenario_fingerprint);
  out.write(reinterpret_cast<const char*>(&seed), sizeof seed);
  const std::uint64_t count = events.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  const std::uint64_t checksum = spawn_stream_checksum(events);
  out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
  for (const SpawnEvent& e : events) {
    out.write(reinterpret_cast<const char*>(&e.step), sizeof e.step);
    out.write(reinterpret_cast<const char*>(&e.source), sizeof e.source);
    out.write(reinterpret_cast<const char*>(&e.angle), sizeof e.angle);
    out.write(reinterpret_cast<const char*>(&e.speed), sizeof e.speed);
  }
  if (!out) throw std::runtime_error("spawn stream: write failed");
}

void save_spawn_stream(const std::filesystem::path& path,
                       std::uint64_t scenario_fingerprint, std::uint64_t seed,
                       const std::vector<SpawnEvent>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("spawn stream: cannot open " + path.string() +
                             " for writing");
  save_spawn_stream(out, scenario_fingerprint, seed, events);
}

SpawnStream load_spawn_stream(std::istream& in) {
  auto read = [&in](void* dst, std::size_t n) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (!in) throw ConfigError("spawn stream: truncated file");
  };

  char magic[4];
  read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ConfigError("spawn stream: bad magic");
  std::uint32_t version;
  read(&version, sizeof version);
  if (version != kVersion)
    throw ConfigError("spawn stream: unsupported version " +
                      std::to_string(version));

  SpawnStream stream;
  read(&stream.scenario_fingerprint, sizeof stream.scenario_fingerprint);
  read(&stream.seed, sizeof stream.seed);
  std::uint64_t count, checksum;
  read(&count, sizeof count);
  read(&checksum, sizeof checksum);
  if (count > (1ull << 32))
    throw ConfigError("spawn stream: implausible record count");

  stream.events.resize(count);
  for (SpawnEvent& e : stream.events) {
    read(&e.step, sizeof e.step);
    read(&e.source, sizeof e.source);
    read(&e.angle, sizeof e.angle);
    read(&e.speed, sizeof e.speed);
  }
  if (spawn_stream_checksum(stream.events) != checksum)
    throw ConfigError("spawn stream: checksum mismatch");
  return stream;
}

SpawnStream load_spawn_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("spawn stream: cannot open " + path.string());
  return load_spawn_stream(in);
}

}  // namespace patrol
