#pragma once

#include <filesystem>
#include <iosfwd>

#include "patrol/lattice_stats.hpp"

namespace patrol {

// Binary cache of a StatsTable ("PTAB" format, see docs/formats.md).
// The embedded scenario fingerprint and quadrature parameters let callers
// decide whether a cached table matches the scenario at hand.

void save_stats_cache(std::ostream& out, const StatsTable& table);
void save_stats_cache(const std::filesystem::path& path,
                      const StatsTable& table);

/// Throws ConfigError on malformed or version-mismatched data.
StatsTable load_stats_cache(std::istream& in);
StatsTable load_stats_cache(const std::filesystem::path& path);

}  // namespace patrol
