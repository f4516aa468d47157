#include "rideq/detail/fixed_fare.hpp"

#include "rideq/detail/scalar.hpp"
#include "rideq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rideq::detail {

SupplyPoint supply_at_cost(const MatchingModel& model, double fleet, double fare, double beta,
                           double trip_time, double cost) {
    double w = (cost - fare) / beta - trip_time;
    if (w <= 0.0)
        return {0.0, fleet};
    double idle = std::pow(model.A / w, 1.0 / model.kappa);
    if (idle >= fleet)
        return {0.0, fleet};
    return {(fleet - idle) / (trip_time + w), idle};
}

namespace {

// Bisect demand(C) - supply(C) = 0 with supply given by a callable;
// supply is nondecreasing in C so the residual is strictly decreasing.
template <class SupplyFn>
double clear_cost(const DemandCurve& demand, double lowest_cost, SupplyFn&& supply) {
    auto residual = [&](double cost) { return demand.realized_demand(cost) - supply(cost); };
    double lo = lowest_cost + 1e-9;
    double hi = lo + 10.0;
    int guard = 0;
    while (residual(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 60)
            throw NoEquilibrium("fixed-fare clearing: no cost level balances supply and demand");
    }
    return detail::bisect(residual, lo, hi, 1e-11);
}

} // namespace

ClearingState fragmented_clearing(const DemandCurve& demand, const MatchingModel& model,
                                  const std::vector<double>& fleets,
                                  const std::vector<double>& fares, double beta,
                                  double trip_time) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        double standalone = fares[i] + beta * (trip_time + model.waiting_time(fleets[i]));
        lowest = std::min(lowest, standalone);
    }
    auto total_supply = [&](double cost) {
        double s = 0.0;
        for (std::size_t i = 0; i < fleets.size(); ++i)
            s += supply_at_cost(model, fleets[i], fares[i], beta, trip_time, cost).q;
        return s;
    };
    ClearingState st;
    st.C = clear_cost(demand, lowest, total_supply);
    st.Q = demand.realized_demand(st.C);
    st.q.resize(fleets.size());
    st.idle.resize(fleets.size());
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        auto sp = supply_at_cost(model, fleets[i], fares[i], beta, trip_time, st.C);
        st.q[i] = sp.q;
        st.idle[i] = sp.idle;
    }
    return st;
}

PooledClearingState pooled_clearing(const DemandCurve& demand, const MatchingModel& model,
                                    double total_fleet, double effective_fare, double tau,
                                    double beta, double trip_time) {
    double lowest =
        effective_fare + tau + beta * (trip_time + model.waiting_time(total_fleet));
    auto supply = [&](double cost) {
        return supply_at_cost(model, total_fleet, effective_fare + tau, beta, trip_time, cost).q;
    };
    PooledClearingState st;
    st.C = clear_cost(demand, lowest, supply);
    st.Q = demand.realized_demand(st.C);
    st.idle = supply_at_cost(model, total_fleet, effective_fare + tau, beta, trip_time, st.C).idle;
    return st;
}

} // namespace rideq::detail
