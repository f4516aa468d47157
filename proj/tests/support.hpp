#pragma once

// Shared scenario builder for the test suite: the Hong-Kong-style calibration
// used by the reproduction experiments.

#include "rideq/market.hpp"

#include <utility>
#include <vector>

inline rideq::MarketConfig hk_config(std::vector<rideq::PlatformFleet> platforms,
                                     double tau = 0.0) {
    return rideq::MarketConfig{rideq::ExponentialDemand(1e5, 0.013),
                               rideq::MatchingModel(5.0, 0.5),
                               120.0,
                               50.0,
                               0.4,
                               tau,
                               std::move(platforms)};
}

inline std::vector<rideq::PlatformFleet> fleets_only(std::initializer_list<double> fleets) {
    std::vector<rideq::PlatformFleet> out;
    for (double n : fleets)
        out.push_back({n, std::nullopt});
    return out;
}

inline std::vector<rideq::PlatformFleet> fared(std::initializer_list<double> fleets,
                                               double fare) {
    std::vector<rideq::PlatformFleet> out;
    for (double n : fleets)
        out.push_back({n, fare});
    return out;
}
