#pragma once

namespace patrol {

/// Execution policy for the data-parallel kernels.  Both policies produce
/// bit-identical results; serial is kept as the reference implementation.
enum class Exec { serial, parallel };

}  // namespace patrol
