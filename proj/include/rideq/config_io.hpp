#pragma once

// JSON scenario files -> MarketConfig. Strict: unknown keys are rejected and
// every error names the offending field path.

#include "rideq/market.hpp"

#include <string>

namespace rideq {

MarketConfig parse_config(const std::string& json_text);
MarketConfig load_config(const std::string& path);

// Stable 64-bit hash of all scenario parameters, for tagging sweep output.
std::string config_hash(const MarketConfig& config);

} // namespace rideq
