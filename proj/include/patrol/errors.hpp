#pragma once

#include <stdexcept>
#include <string>

namespace patrol {

/// Invalid scenario or mismatched cached data.  The CLI maps this to exit
/// code 2, everything else unexpected to 3.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace patrol
