#include "rideq/mixed.hpp"

#include "rideq/detail/fixed_fare.hpp"
#include "rideq/detail/scalar.hpp"
#include "rideq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace rideq {

namespace {

constexpr int kScanPoints = 257;
constexpr int kOuterIterations = 80;
constexpr int kInnerIterations = 120;
constexpr double kCornerTol = 1e-12;
constexpr double kRootDemandFloor = 1e-6; // trips/hour counted as "channel used"

// Interior state at a candidate passenger cost C and integrator demand Q1.
// The integrator's idle stock follows from channel indifference; each
// platform is either on its direct-cost indifference curve or at the
// conservation corner with no direct trips.
struct InteriorState {
    double pool_idle;         // idle stock implied by the integrator cost
    double occupancy;         // integrator busy vehicles per idle vehicle
    double mean_fare;         // idle-weighted fare across the pool
    std::vector<double> idle; // per-platform idle stock
    std::vector<double> q2;   // per-platform direct demand
    double consistency;       // sum(idle) - pool_idle
};

std::optional<InteriorState> interior_state(double cost, double q1_total,
                                            const std::vector<double>& fares, double tau,
                                            const std::vector<double>& fleets,
                                            const MarketConfig& cfg) {
    const auto& m = cfg.matching;
    double mean_fare = fares[0];
    InteriorState st;
    for (int round = 0; round < 100; ++round) {
        double w1 = (cost - mean_fare - tau) / cfg.beta - cfg.T;
        if (w1 <= 0.0)
            return std::nullopt; // integrator channel priced above C
        double pool_idle = std::pow(m.A / w1, 1.0 / m.kappa);
        double occupancy = q1_total * (cfg.T + w1) / pool_idle;
        st.idle.assign(fleets.size(), 0.0);
        st.q2.assign(fleets.size(), 0.0);
        for (std::size_t i = 0; i < fleets.size(); ++i) {
            double w2 = (cost - fares[i]) / cfg.beta - cfg.T;
            bool corner = true;
            if (w2 > 0.0) {
                double xd = std::pow(m.A / w2, 1.0 / m.kappa);
                double qd = (fleets[i] - xd * (1.0 + occupancy)) / (cfg.T + w2);
                if (qd > 0.0) {
                    st.idle[i] = xd;
                    st.q2[i] = qd;
                    corner = false;
                }
            }
            if (corner)
                st.idle[i] = fleets[i] / (1.0 + occupancy);
        }
        double idle_sum = 0.0, weighted = 0.0;
        for (std::size_t i = 0; i < fleets.size(); ++i) {
            idle_sum += st.idle[i];
            weighted += st.idle[i] * fares[i];
        }
        double next = weighted / idle_sum;
        st.pool_idle = pool_idle;
        st.occupancy = occupancy;
        st.mean_fare = mean_fare;
        st.consistency = idle_sum - pool_idle;
        if (std::abs(next - mean_fare) < 1e-13)
            return st;
        mean_fare = next;
    }
    return st;
}

struct InnerResult {
    double q1_total;
    InteriorState state;
};

// Split demand(C) between channels: q1 + sum q2(q1) = demand(C). The
// residual is strictly increasing in q1.
std::optional<InnerResult> inner_split(double cost, const std::vector<double>& fares,
                                       double tau, const std::vector<double>& fleets,
                                       const MarketConfig& cfg) {
    double q_total = cfg.demand.realized_demand(cost);
    auto residual = [&](double q1) -> std::optional<double> {
        auto st = interior_state(cost, q1, fares, tau, fleets, cfg);
        if (!st)
            return std::nullopt;
        double s = q1;
        for (double v : st->q2)
            s += v;
        return s - q_total;
    };
    auto r_lo = residual(0.0);
    if (!r_lo)
        return std::nullopt;
    double q1;
    auto r_hi = residual(q_total);
    if (*r_lo >= 0.0) {
        q1 = 0.0;
    } else if (r_hi && *r_hi <= 0.0) {
        q1 = q_total;
    } else {
        double lo = 0.0, hi = q_total;
        for (int it = 0; it < kInnerIterations; ++it) {
            double mid = 0.5 * (lo + hi);
            auto r = residual(mid);
            if (r && *r < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        q1 = 0.5 * (lo + hi);
    }
    auto st = interior_state(cost, q1, fares, tau, fleets, cfg);
    if (!st)
        return std::nullopt;
    return InnerResult{q1, *st};
}

MixedEquilibrium all_integrator_corner(const detail::PooledClearingState& pooled,
                                       const std::vector<double>& fares, double tau,
                                       const std::vector<double>& fleets,
                                       const MarketConfig& cfg) {
    MixedEquilibrium eq;
    const std::size_t n = fleets.size();
    double total_fleet = 0.0;
    for (double v : fleets)
        total_fleet += v;
    eq.regime = MixedRegime::AllIntegrator;
    eq.tau = tau;
    eq.fares = fares;
    eq.Q1 = pooled.Q;
    eq.Q2 = 0.0;
    eq.Q = pooled.Q;
    eq.C = pooled.C;
    eq.C1 = pooled.C;
    eq.pooled_idle = pooled.idle;
    eq.integrator_demand.resize(n);
    eq.direct_demand.assign(n, 0.0);
    eq.idle.resize(n);
    eq.C2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double share = fleets[i] / total_fleet;
        eq.integrator_demand[i] = share * pooled.Q;
        eq.idle[i] = share * pooled.idle;
        eq.C2[i] =
            fares[i] + cfg.beta * (cfg.T + cfg.matching.waiting_time(eq.idle[i]));
    }
    return eq;
}

MixedEquilibrium no_integrator_corner(const detail::ClearingState& frag,
                                      const std::vector<double>& fares, double tau,
                                      const std::vector<double>& fleets,
                                      const MarketConfig& cfg) {
    MixedEquilibrium eq;
    const std::size_t n = fleets.size();
    eq.regime = MixedRegime::NoIntegrator;
    eq.tau = tau;
    eq.fares = fares;
    eq.Q1 = 0.0;
    eq.Q2 = frag.Q;
    eq.Q = frag.Q;
    eq.C = frag.C;
    eq.integrator_demand.assign(n, 0.0);
    eq.direct_demand = frag.q;
    eq.idle = frag.idle;
    eq.C2.resize(n);
    double idle_sum = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        eq.C2[i] = fares[i] + cfg.beta * (cfg.T + cfg.matching.waiting_time(frag.idle[i]));
        idle_sum += frag.idle[i];
        weighted += frag.idle[i] * fares[i];
    }
    eq.pooled_idle = idle_sum;
    eq.C1 = weighted / idle_sum + cfg.beta * (cfg.T + cfg.matching.waiting_time(idle_sum)) + tau;
    return eq;
}

} // namespace

MixedEquilibrium solve_mixed(const std::vector<double>& fares, double tau,
                             const std::vector<double>& fleets, const MarketConfig& config,
                             SolveInfo* info) {
    config.validate();
    if (fares.size() != fleets.size())
        throw DimensionError("fare vector length does not match fleet vector");
    if (!std::isfinite(tau))
        throw ValidationError("commission must be finite");
    const auto& cfg = config;
    double total_fleet = 0.0, effective_fare = 0.0;
    for (std::size_t i = 0; i < fleets.size(); ++i)
        total_fleet += fleets[i];
    for (std::size_t i = 0; i < fleets.size(); ++i)
        effective_fare += fleets[i] / total_fleet * fares[i];

    // Corner 1: everyone on the integrator. Stable when no platform's direct
    // channel can undercut the pooled cost.
    auto pooled = detail::pooled_clearing(cfg.demand, cfg.matching, total_fleet, effective_fare,
                                          tau, cfg.beta, cfg.T);
    double min_direct = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        double share_idle = fleets[i] / total_fleet * pooled.idle;
        min_direct = std::min(
            min_direct, fares[i] + cfg.beta * (cfg.T + cfg.matching.waiting_time(share_idle)));
    }
    if (pooled.C <= min_direct + kCornerTol)
        return all_integrator_corner(pooled, fares, tau, fleets, cfg);

    // Corner 2: integrator unused. Stable when its channel cost at the
    // fragmented allocation is no bargain.
    auto frag = detail::fragmented_clearing(cfg.demand, cfg.matching, fleets, fares, cfg.beta,
                                            cfg.T);
    double idle_sum = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        idle_sum += frag.idle[i];
        weighted += frag.idle[i] * fares[i];
    }
    double c1_at_frag =
        weighted / idle_sum + cfg.beta * (cfg.T + cfg.matching.waiting_time(idle_sum)) + tau;
    if (c1_at_frag >= frag.C - kCornerTol)
        return no_integrator_corner(frag, fares, tau, fleets, cfg);

    // Interior: scan the pooled-stock consistency residual over the cost
    // bracket spanned by the two corner costs, then bisect each sign change.
    auto consistency = [&](double cost) -> std::optional<double> {
        auto r = inner_split(cost, fares, tau, fleets, cfg);
        if (!r)
            return std::nullopt;
        return r->state.consistency;
    };
    double lo = std::min(pooled.C, frag.C) - 1e-6;
    double hi = std::max(pooled.C, frag.C) + 1e-6;
    std::vector<double> grid(kScanPoints), vals(kScanPoints);
    std::vector<bool> defined(kScanPoints);
    for (int i = 0; i < kScanPoints; ++i) {
        grid[i] = lo + (hi - lo) * i / (kScanPoints - 1);
        auto v = consistency(grid[i]);
        defined[i] = v.has_value();
        vals[i] = v.value_or(0.0);
    }
    std::vector<double> roots;
    for (int i = 0; i + 1 < kScanPoints; ++i) {
        if (!defined[i] || !defined[i + 1])
            continue;
        if ((vals[i] >= 0.0) == (vals[i + 1] >= 0.0))
            continue;
        double ga = grid[i], gb = grid[i + 1];
        bool left_sign = vals[i] >= 0.0;
        for (int it = 0; it < kOuterIterations; ++it) {
            double mid = 0.5 * (ga + gb);
            auto v = consistency(mid);
            if (v && (*v >= 0.0) == left_sign)
                ga = mid;
            else
                gb = mid;
        }
        roots.push_back(0.5 * (ga + gb));
    }

    std::vector<MixedEquilibrium> candidates;
    for (double cost : roots) {
        auto r = inner_split(cost, fares, tau, fleets, cfg);
        if (!r)
            continue;
        double q2_total = 0.0;
        for (double v : r->state.q2)
            q2_total += v;
        if (r->q1_total <= kRootDemandFloor || q2_total <= kRootDemandFloor)
            continue; // a corner in disguise; handled above when stable
        MixedEquilibrium eq;
        const std::size_t n = fleets.size();
        eq.regime = MixedRegime::Mixed;
        eq.tau = tau;
        eq.fares = fares;
        eq.Q1 = r->q1_total;
        eq.Q2 = q2_total;
        eq.Q = eq.Q1 + eq.Q2;
        eq.C = cfg.demand.inverse_demand(eq.Q);
        eq.direct_demand = r->state.q2;
        eq.idle = r->state.idle;
        double total_idle = 0.0;
        for (double v : r->state.idle)
            total_idle += v;
        eq.pooled_idle = total_idle;
        eq.C1 = r->state.mean_fare +
                cfg.beta * (cfg.T + cfg.matching.waiting_time(total_idle)) + tau;
        eq.integrator_demand.resize(n);
        eq.C2.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            eq.integrator_demand[i] = r->state.idle[i] / total_idle * eq.Q1;
            eq.C2[i] =
                fares[i] + cfg.beta * (cfg.T + cfg.matching.waiting_time(r->state.idle[i]));
        }
        candidates.push_back(std::move(eq));
    }
    if (candidates.empty())
        throw NoEquilibrium("no stable corner and no interior channel-choice root");
    if (candidates.size() > 1 && info) {
        info->multiple_fixed_points = true;
        info->warnings.push_back("multiple interior channel-choice roots; reporting the first");
    }
    if (info) {
        info->best_response_converged = true;
        info->iterations = kOuterIterations;
    }
    return candidates.front();
}

CommissionRange commission_range(const std::vector<double>& fares,
                                 const std::vector<double>& fleets,
                                 const MarketConfig& config) {
    config.validate();
    if (fares.size() != fleets.size())
        throw DimensionError("fare vector length does not match fleet vector");
    const auto& cfg = config;
    double total_fleet = 0.0, effective_fare = 0.0;
    for (double v : fleets)
        total_fleet += v;
    for (std::size_t i = 0; i < fleets.size(); ++i)
        effective_fare += fleets[i] / total_fleet * fares[i];

    // tau_1: margin of the all-integrator corner, strictly decreasing in tau.
    auto corner_margin = [&](double tau) {
        auto pooled = detail::pooled_clearing(cfg.demand, cfg.matching, total_fleet,
                                              effective_fare, tau, cfg.beta, cfg.T);
        double min_direct = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < fleets.size(); ++i) {
            double share_idle = fleets[i] / total_fleet * pooled.idle;
            min_direct = std::min(min_direct,
                                  fares[i] + cfg.beta * (cfg.T + cfg.matching.waiting_time(
                                                                     share_idle)));
        }
        return min_direct - pooled.C;
    };
    if (corner_margin(0.0) <= 0.0)
        throw DegenerateRange("integration is not universally adopted even at zero commission");
    double hi = 1.0;
    int guard = 0;
    while (corner_margin(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 60)
            throw DegenerateRange("all-integrator corner never destabilizes");
    }
    double tau_1 = detail::bisect(corner_margin, 0.0, hi, 1e-6);

    // tau_2: the integrator channel's cost at the fragmented allocation rises
    // one-for-one with tau; find where it crosses the fragmented market cost.
    auto frag = detail::fragmented_clearing(cfg.demand, cfg.matching, fleets, fares, cfg.beta,
                                            cfg.T);
    double idle_sum = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        idle_sum += frag.idle[i];
        weighted += frag.idle[i] * fares[i];
    }
    auto entry_margin = [&](double tau) {
        return weighted / idle_sum + cfg.beta * (cfg.T + cfg.matching.waiting_time(idle_sum)) +
               tau - frag.C;
    };
    double lo2 = 0.0, hi2 = 1.0;
    guard = 0;
    while (entry_margin(lo2) > 0.0) {
        lo2 -= hi2;
        hi2 *= 2.0;
        if (++guard > 60)
            throw DegenerateRange("integrator entry margin has no lower crossing");
    }
    hi2 = 1.0;
    guard = 0;
    while (entry_margin(hi2) < 0.0) {
        hi2 *= 2.0;
        if (++guard > 60)
            throw DegenerateRange("integrator entry margin has no upper crossing");
    }
    double tau_2 = detail::bisect(entry_margin, lo2, hi2, 1e-6);

    if (!(tau_1 < tau_2))
        throw DegenerateRange("commission range is empty: tau_1 >= tau_2");
    return {tau_1, tau_2};
}

std::vector<CommissionRow> sweep_commission(const std::vector<double>& fares,
                                            const std::vector<double>& fleets,
                                            const MarketConfig& config,
                                            const std::vector<double>& tau_grid) {
    for (std::size_t i = 1; i < tau_grid.size(); ++i)
        if (tau_grid[i] < tau_grid[i - 1])
            throw ValidationError("commission grid must be sorted ascending");
    std::vector<CommissionRow> rows;
    rows.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        CommissionRow row;
        row.tau = tau;
        try {
            MixedEquilibrium eq = solve_mixed(fares, tau, fleets, config);
            row.Q = eq.Q;
            row.Q1 = eq.Q1;
            row.Q2 = eq.Q2;
            row.regime = eq.regime;
            row.ok = true;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

MarketMetrics metrics(const MixedEquilibrium& eq, const std::vector<double>& fleets,
                      const MarketConfig& config) {
    MarketMetrics m;
    const std::size_t n = fleets.size();
    m.profit.resize(n);
    m.utilization.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double served = eq.integrator_demand[i] + eq.direct_demand[i];
        m.profit[i] = served * eq.fares[i] - config.c * fleets[i];
        m.utilization[i] = served * config.T / fleets[i];
        m.total_profit += m.profit[i];
    }
    double gross = config.demand.gross_surplus(eq.Q);
    m.consumer_surplus = eq.Q > 0.0 ? gross - eq.Q * eq.C : 0.0;
    m.integrator_revenue = eq.tau * eq.Q1;
    // Resource-cost form: gross surplus net of passenger time and fleet cost.
    double wait_pool = config.matching.waiting_time(eq.pooled_idle);
    double time_cost = eq.Q1 * config.beta * (config.T + wait_pool);
    for (std::size_t i = 0; i < n; ++i)
        time_cost += eq.direct_demand[i] * config.beta *
                     (config.T + config.matching.waiting_time(eq.idle[i]));
    double total_fleet = 0.0;
    for (double v : fleets)
        total_fleet += v;
    m.welfare = gross - time_cost - config.c * total_fleet;
    return m;
}

} // namespace rideq
