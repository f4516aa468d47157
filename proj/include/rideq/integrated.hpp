#pragma once

// Fully integrated market: one third-party matcher pools every platform's
// idle vehicles and dispatches proportionally to fleet size, charging a
// per-trip commission tau.

#include "rideq/market.hpp"

#include <vector>

namespace rideq {

struct IntegratedEquilibrium {
    double fare = 0.0; // common effective fare (HKD/trip)
    double tau = 0.0;
    double Q = 0.0;           // total demand
    double pooled_idle = 0.0; // shared idle stock
    std::vector<double> q;     // per-platform demand, proportional to fleet
    std::vector<double> idle;  // per-platform idle contribution (share of pool)
    std::vector<double> share; // fleet shares N_i / N
};

struct IntegratedSolution {
    IntegratedEquilibrium eq;
    MarketMetrics metrics;
    SolveInfo info;
};

// Equilibrium at exogenous fares (effective fare = fleet-weighted mean),
// restricted to the normal regime of the pooled conservation curve.
IntegratedEquilibrium evaluate_given_fares(const std::vector<double>& fares, double tau,
                                           const std::vector<double>& fleets,
                                           const MarketConfig& config);

// Nash equilibrium in quantities against the pooled stock. The reported
// dispatch split is proportional (q_i = (N_i/N) Q); the quantities at which
// the strategic first-order conditions hold exactly are returned in
// info.strategic_demand and coincide with the split for equal fleets.
IntegratedSolution solve_integrated_nash(double tau, const std::vector<double>& fleets,
                              const MarketConfig& config);

// Welfare-maximizing total demand against the pooled stock (one-dimensional
// planner problem; the split is proportional and welfare-irrelevant).
IntegratedSolution solve_integrated_optimum(const std::vector<double>& fleets,
                                        const MarketConfig& config);

// Counterfactual: platforms keep their pre-integration fares, the pool and
// commission apply. Used to separate the pooling effect from repricing.
IntegratedSolution unchanged_fare_outcome(const std::vector<double>& fares, double tau,
                                          const std::vector<double>& fleets,
                                          const MarketConfig& config);

MarketMetrics metrics(const IntegratedEquilibrium& eq, const std::vector<double>& fleets,
                      const MarketConfig& config);

} // namespace rideq
