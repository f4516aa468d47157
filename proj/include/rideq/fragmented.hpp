#pragma once

// Market without integration: each passenger patronizes one platform and
// idle pools are separate. Fixed-fare evaluation, Nash and social-optimum
// solvers, and market metrics.

#include "rideq/market.hpp"

#include <vector>

namespace rideq {

struct FragmentedEquilibrium {
    std::vector<double> q;    // per-platform demand rate (trips/hour)
    std::vector<double> idle; // per-platform idle stock (vehicles)
    std::vector<double> fare; // HKD/trip (recovered from indifference when solved)
    std::vector<double> wait; // W at the platform's idle stock (hours)
    std::vector<Regime> regime;
    double Q = 0.0; // total demand
    double C = 0.0; // generalized cost B(Q)
};

struct FragmentedSolution {
    FragmentedEquilibrium eq;
    MarketMetrics metrics;
    SolveInfo info;
};

// Equilibrium at exogenous fares, restricted to the normal regime.
// Platforms whose standalone cost exceeds the market cost sit at q = 0.
FragmentedEquilibrium evaluate_given_fares(const std::vector<double>& fares,
                                           const std::vector<double>& fleets,
                                           const MarketConfig& config);

// Nash equilibrium in quantities: damped simultaneous best response from 5
// deterministic starts, polished by bisection on the aggregate first-order
// system. Fares recovered from passenger indifference.
FragmentedSolution solve_fragmented_nash(const std::vector<double>& fleets, const MarketConfig& config);

// Welfare-maximizing quantities, same solver skeleton with the planner's
// first-order conditions.
FragmentedSolution solve_fragmented_optimum(const std::vector<double>& fleets,
                                        const MarketConfig& config);

// Commission headroom below which integration raises equilibrium demand:
// [B(Q_int) + (1/I) Q_int B'(Q_int)] - [B(Q_frag) + (1/I) Q_frag B'(Q_frag)],
// evaluated at the two zero-commission Nash equilibria.
double commission_headroom(double q_fragmented, double q_integrated, int platform_count,
                           const DemandCurve& demand);

MarketMetrics metrics(const FragmentedEquilibrium& eq, const std::vector<double>& fleets,
                      const MarketConfig& config);

} // namespace rideq
