#pragma once

#include <chrono>

namespace chainfleet {

/// Simulation clock unit. All ledger and simulator timestamps are integral milliseconds.
using Millis = std::chrono::milliseconds;

}  // namespace chainfleet
