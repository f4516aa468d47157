#pragma once

// Shared market configuration and metric types.

#include "rideq/demand.hpp"
#include "rideq/matching.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rideq {

struct PlatformFleet {
    double fleet;               // vehicles
    std::optional<double> fare; // HKD/trip; empty means solver-chosen
};

// Exogenous parameters of one market scenario.
struct MarketConfig {
    ExponentialDemand demand;
    MatchingModel matching;
    double beta; // passenger value of time (HKD/hour)
    double c;    // operating cost (HKD/vehicle-hour)
    double T;    // trip time (hours)
    double tau;  // integrator commission (HKD/trip)
    std::vector<PlatformFleet> platforms;

    std::vector<double> fleets() const {
        std::vector<double> out;
        out.reserve(platforms.size());
        for (const auto& p : platforms)
            out.push_back(p.fleet);
        return out;
    }

    bool all_fares_set() const {
        for (const auto& p : platforms)
            if (!p.fare)
                return false;
        return !platforms.empty();
    }

    std::vector<double> fares() const {
        std::vector<double> out;
        out.reserve(platforms.size());
        for (const auto& p : platforms)
            out.push_back(p.fare.value_or(0.0));
        return out;
    }

    void validate() const; // throws ValidationError
};

struct MarketMetrics {
    std::vector<double> profit;      // per-platform, HKD/hour
    double total_profit = 0.0;
    double consumer_surplus = 0.0;   // HKD/hour
    double integrator_revenue = 0.0; // HKD/hour (commission * pooled demand)
    double welfare = 0.0;            // HKD/hour
    std::vector<double> utilization; // q_i T / N_i, dimensionless
};

// Diagnostics attached to solver outputs.
struct SolveInfo {
    int iterations = 0;
    int restarts = 0;
    bool best_response_converged = false;
    bool multiple_fixed_points = false;
    std::vector<double> foc_residuals; // per platform, HKD
    // Quantities at which the per-platform first-order conditions hold
    // exactly. For the integrated market with unequal fleets these differ
    // from the reported proportional dispatch split; see integrated.hpp.
    std::vector<double> strategic_demand;
    std::vector<std::string> warnings;
};

} // namespace rideq
