#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace patrol {

/// One raw spawn draw, recorded before the zone-crossing discard rule is
/// applied so that replay reproduces the discard bookkeeping too.
struct SpawnEvent {
  std::int32_t step = 0;    // 1-based simulation step
  std::int32_t source = 0;  // index into the scenario's source list
  double angle = 0.0;       // takeoff angle, radians in [0, pi)
  double speed = 0.0;       // length units per time-step

  friend bool operator==(const SpawnEvent& a, const SpawnEvent& b) {
    return a.step == b.step && a.source == b.source && a.angle == b.angle &&
           a.speed == b.speed;
  }
};

std::uint64_t spawn_stream_checksum(const std::vector<SpawnEvent>& events);

// "PSPN" binary stream, see docs/formats.md.  The header carries the
// scenario fingerprint, the seed that generated the draws, and an FNV-1a
// checksum over the records.

void save_spawn_stream(std::ostream& out, std::uint64_t scenario_fingerprint,
                       std::uint64_t seed,
                       const std::vector<SpawnEvent>& events);
void save_spawn_stream(const std::filesystem::path& path,
                       std::uint64_t scenario_fingerprint, std::uint64_t seed,
                       const std::vector<SpawnEvent>& events);

struct SpawnStream {
  std::uint64_t scenario_fingerprint = 0;
  std::uint64_t seed = 0;
  std::vector<SpawnEvent> events;
};

/// Throws ConfigError on malformed data or checksum mismatch.
SpawnStream load_spawn_stream(std::istream& in);
SpawnStream load_spawn_stream(const std::filesystem::path& path);

}  // namespace patrol
