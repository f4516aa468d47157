#pragma once

// Matching friction model: power-law waiting/pick-up time in the idle
// vehicle count, inversion of the vehicle-conservation identity for the
// idle stock, congestion-regime classification, and the sensitivity of the
// idle stock to demand.

namespace rideq {

// W(n) = A * n^(-kappa). Strictly decreasing and convex for n > 0.
struct MatchingModel {
    double A;     // matching constant (hours * vehicles^kappa)
    double kappa; // sensitivity exponent, 0 < kappa <= 1

    MatchingModel(double A_, double kappa_);

    double waiting_time(double idle) const;
    // Returns {W', W''}.
    struct Derivatives {
        double first;
        double second;
    };
    Derivatives waiting_time_derivatives(double idle) const;
};

// Normal: idle stock shrinks as demand grows (upper branch of the
// conservation curve). WGC ("wild goose chase"): the congested lower branch
// where additional demand is unsustainable.
enum class Regime { Normal, WGC };

struct IdleSolution {
    double idle_vehicles; // real-valued (fluid model)
    Regime regime;
    double residual; // conservation residual in vehicles
};

// Which conservation structure the demand flows through.
enum class PoolMode {
    Platform,    // one platform serving its own demand: 1 + q W' test
    PooledShare, // one platform's share of a pooled stock: share + q W' test
    PooledTotal  // total demand against the pooled stock: 1 + Q W' test
};

// Conservation curve q = (fleet - x) / (T + W(x)) for one vehicle pool,
// with the feasibility peak located once at construction. The inverted-U
// shape gives a normal root (x above the peak) and a WGC root (below).
class ConservationCurve {
public:
    ConservationCurve(const MatchingModel& model, double fleet, double trip_time);

    double fleet() const { return fleet_; }
    double trip_time() const { return trip_time_; }
    double peak_idle() const { return peak_idle_; }
    double peak_demand() const { return peak_demand_; }

    // Sustainable demand rate at idle stock x.
    double demand_at(double idle) const;

    // Normal-branch idle stock sustaining demand q. Throws InfeasibleDemand
    // past the peak; q within 1e-9 relative of the peak returns the peak.
    double idle_for(double q) const;

    // Diagnostic: the congested (lower) root for the same q.
    double wgc_idle_for(double q) const;

private:
    const MatchingModel* model_;
    double fleet_;
    double trip_time_;
    double peak_idle_;
    double peak_demand_;
};

// Normal-branch inversion of the per-platform conservation identity
// fleet = idle + q * (T + W(idle)).
IdleSolution solve_idle_platform(const MatchingModel& model, double fleet, double q,
                                 double trip_time);

// Same inversion for the pooled stock of an integrated market.
IdleSolution solve_idle_pooled(const MatchingModel& model, double total_fleet, double total_q,
                               double trip_time);

// Demand level at which the normal and WGC branches merge.
double max_feasible_demand(const MatchingModel& model, double fleet, double trip_time);

// Regime test at (q, idle). share is only used in PooledShare mode.
// The zero boundary classifies as WGC.
Regime wgc_classify(const MatchingModel& model, double q, double idle, double share,
                    PoolMode mode);

// d(idle)/dq and d^2(idle)/dq^2 along the conservation identity, at a
// normal-regime point. share is only used in PooledShare mode.
struct IdleSensitivity {
    double first;
    double second;
};
IdleSensitivity idle_sensitivity(const MatchingModel& model, double q, double idle,
                                 double trip_time, double share, PoolMode mode);

// The appendix-style diagnostic curves used in monotonicity arguments.
enum class BranchKind {
    PlatformSupply,    // (N_i - x) / (T + W(x))
    IdleRatio,         // (1 - u) T / (T + W(N_i u)), 0 < u < 1
    PooledShareSupply, // (N_i - (N_i/N) x) / (T + W(x))
    PooledSupply       // (N - x) / (T + W(x))
};
double evaluate_branch_curve(const MatchingModel& model, BranchKind kind, double x,
                             double fleet_i, double fleet_total, double trip_time);

} // namespace rideq
