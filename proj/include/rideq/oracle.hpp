#pragma once

// Independent verification layer. Everything here recomputes equilibrium
// properties from first principles — dense grid search and scan-based
// inversion of the conservation identity — sharing only the model
// definitions (demand curve, waiting-time law) with the solvers, never
// their root-finding or fixed-point machinery.

#include "rideq/fragmented.hpp"
#include "rideq/integrated.hpp"
#include "rideq/market.hpp"
#include "rideq/mixed.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace rideq {

enum class MarketForm { Fragmented, Integrated };

struct ResidualEntry {
    std::string name;
    double value;     // signed residual in natural units
    double tolerance; // absolute bound the entry is held to
    bool pass;
};

struct ResidualReport {
    std::vector<ResidualEntry> entries;
    double max_abs_scaled = 0.0; // max |value| / tolerance over entries
    bool pass = true;

    void add(std::string name, double value, double tolerance);
};

// Indifference, conservation, aggregation and regime residuals of a solved
// equilibrium, each recomputed independently of the solver's internals.
ResidualReport check_residuals(const FragmentedEquilibrium& eq,
                               const std::vector<double>& fleets, const MarketConfig& config);
ResidualReport check_residuals(const IntegratedEquilibrium& eq,
                               const std::vector<double>& fleets, const MarketConfig& config);
ResidualReport check_residuals(const MixedEquilibrium& eq, const std::vector<double>& fleets,
                               const MarketConfig& config);

// Brute-force best response of one platform on a uniform demand grid of
// grid_size points over [0, 0.999 * feasible maximum], rivals held at
// profile q. In the fragmented form the platform's own entry of q is
// ignored. In the integrated form each platform perceives the pooled idle
// stock through its own conservation identity, share * X + q (T + W(X)) =
// n, whose constant n is anchored at the supplied profile; the own entry
// of q must therefore be the candidate point under test. Ties break to
// the smaller grid index, so the result is independent of thread count.
double grid_best_response(std::size_t platform_index, const std::vector<double>& q,
                          const std::vector<double>& fleets, const MarketConfig& config,
                          std::size_t grid_size, MarketForm form, double tau = 0.0,
                          bool parallel = true);

// Brute-force welfare maximizer on a per-platform uniform grid (grid_size
// points per dimension). Fragmented form supports up to three platforms;
// more throws DimensionError. Integrated form is one-dimensional in total
// demand; the returned vector is its proportional split.
std::vector<double> grid_welfare_max(MarketForm form, const std::vector<double>& fleets,
                                     const MarketConfig& config, std::size_t grid_size,
                                     bool parallel = true);

// Central difference (f(x+h) - f(x-h)) / 2h.
double finite_difference(const std::function<double(double)>& f, double point, double step);

namespace oracle_detail {

// Scan-based normal-branch inversion of fleet = x + q (T + W(x)).
// Returns NaN when q is infeasible for the pool.
double invert_conservation(const MatchingModel& model, double fleet, double q,
                           double trip_time);

// Peak sustainable demand found by dense scan of the conservation curve.
double scan_max_demand(const MatchingModel& model, double fleet, double trip_time);

} // namespace oracle_detail

} // namespace rideq
