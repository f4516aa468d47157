#pragma once

// Cost-parameterized fixed-fare market clearing, valid on both branches of
// the conservation curve. At passenger cost level C a platform with fare F
// faces waiting budget w = (C - F)/beta - T; inverting W gives the idle
// stock directly, so no branch selection is needed. Shared by the
// fragmented/integrated fixed-fare evaluators and the mixed-market solver.

#include "rideq/demand.hpp"
#include "rideq/matching.hpp"

#include <vector>

namespace rideq::detail {

struct SupplyPoint {
    double q;    // trips/hour the platform serves at this cost level
    double idle; // its idle stock (= fleet when priced out)
};

// Supply of one independent platform at cost level C. Zero (priced out)
// when C is at or below the platform's standalone zero-demand cost.
SupplyPoint supply_at_cost(const MatchingModel& model, double fleet, double fare, double beta,
                           double trip_time, double cost);

struct ClearingState {
    double C; // market generalized cost
    double Q; // total realized demand
    std::vector<double> q;
    std::vector<double> idle;
};

// Market-clearing cost for independent platforms at fixed fares.
ClearingState fragmented_clearing(const DemandCurve& demand, const MatchingModel& model,
                                  const std::vector<double>& fleets,
                                  const std::vector<double>& fares, double beta,
                                  double trip_time);

struct PooledClearingState {
    double C;
    double Q;
    double idle; // pooled idle stock
};

// Market-clearing cost for one pooled stock at effective fare + commission.
PooledClearingState pooled_clearing(const DemandCurve& demand, const MatchingModel& model,
                                    double total_fleet, double effective_fare, double tau,
                                    double beta, double trip_time);

} // namespace rideq::detail
