#pragma once

// Partially integrated market at fixed fares: passengers choose between the
// integrator channel (pooled idle stock, commission tau, fleet-proportional
// dispatch) and each platform's direct channel. Passengers are indifferent
// across all channels they use; unused channels must not undercut.

#include "rideq/market.hpp"

#include <vector>

namespace rideq {

enum class MixedRegime { AllIntegrator, Mixed, NoIntegrator };

struct MixedEquilibrium {
    std::vector<double> integrator_demand; // q1_i, dispatched through the pool
    std::vector<double> direct_demand;     // q2_i, served bilaterally
    std::vector<double> idle;              // per-platform idle stock
    double pooled_idle = 0.0;              // idle visible to the integrator
    double Q1 = 0.0;                       // total integrator demand
    double Q2 = 0.0;                       // total direct demand
    double Q = 0.0;
    double C = 0.0;          // market generalized cost B(Q)
    double C1 = 0.0;         // integrator-channel cost
    std::vector<double> C2;  // direct-channel cost per platform
    double tau = 0.0;
    std::vector<double> fares;
    MixedRegime regime = MixedRegime::Mixed;
};

// Channel-choice equilibrium at fixed fares and commission. Checks the two
// corner regimes for stability first; otherwise locates the interior root of
// the pooled-stock consistency residual by scan plus bisection. A second
// validated interior root is flagged through info->warnings.
MixedEquilibrium solve_mixed(const std::vector<double>& fares, double tau,
                             const std::vector<double>& fleets, const MarketConfig& config,
                             SolveInfo* info = nullptr);

struct CommissionRange {
    double tau_1; // commissions below this leave everyone on the integrator
    double tau_2; // commissions above this leave the integrator unused
};

// Both thresholds located by bisection to 1e-6 HKD. Throws DegenerateRange
// when tau_1 >= tau_2 (no interior commission interval).
CommissionRange commission_range(const std::vector<double>& fares,
                                 const std::vector<double>& fleets,
                                 const MarketConfig& config);

struct CommissionRow {
    double tau;
    double Q = 0.0;
    double Q1 = 0.0;
    double Q2 = 0.0;
    MixedRegime regime = MixedRegime::Mixed;
    bool ok = false;
    std::string error; // empty when ok
};

// One solve_mixed per grid point; solver failures become row-level markers.
// tau_grid must be sorted ascending.
std::vector<CommissionRow> sweep_commission(const std::vector<double>& fares,
                                            const std::vector<double>& fleets,
                                            const MarketConfig& config,
                                            const std::vector<double>& tau_grid);

MarketMetrics metrics(const MixedEquilibrium& eq, const std::vector<double>& fleets,
                      const MarketConfig& config);

} // namespace rideq
