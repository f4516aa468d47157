#include "rideq/oracle.hpp"

#include "rideq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rideq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUsedChannelFloor = 1e-6; // trips/hour

// Deterministic grid argmax: highest value, ties to the smaller index.
// The parallel path partitions the index range and merges per-thread
// winners with the same rule, so it matches the serial path exactly.
template <class Eval>
long argmax_cells(long n_cells, Eval&& value_at, bool parallel) {
    double best_val = -kInf;
    long best_idx = -1;
    if (!parallel) {
        for (long idx = 0; idx < n_cells; ++idx) {
            double v = value_at(idx);
            if (v > best_val) {
                best_val = v;
                best_idx = idx;
            }
        }
        return best_idx;
    }
#pragma omp parallel
    {
        double local_val = -kInf;
        long local_idx = -1;
#pragma omp for nowait schedule(static)
        for (long idx = 0; idx < n_cells; ++idx) {
            double v = value_at(idx);
            if (v > local_val) {
                local_val = v;
                local_idx = idx;
            }
        }
#pragma omp critical
        {
            if (local_val > best_val ||
                (local_val == best_val && local_idx >= 0 &&
                 (best_idx < 0 || local_idx < best_idx))) {
                best_val = local_val;
                best_idx = local_idx;
            }
        }
    }
    return best_idx;
}

} // namespace

namespace oracle_detail {

double invert_conservation(const MatchingModel& model, double fleet, double q,
                           double trip_time) {
    if (q <= 0.0)
        return fleet;
    auto gap = [&](double x) {
        return fleet - x - q * (trip_time + model.waiting_time(x));
    };
    const int n = 4096;
    double prev_x = fleet;
    double prev_g = gap(fleet); // always negative for q > 0
    for (int k = 1; k <= n; ++k) {
        double x = fleet * (1.0 - static_cast<double>(k) / n);
        if (x <= 0.0)
            break;
        double g = gap(x);
        if ((g >= 0.0) != (prev_g >= 0.0)) {
            double lo = x, hi = prev_x; // g(hi) < 0 <= g(lo)
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (gap(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_x = x;
        prev_g = g;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double scan_max_demand(const MatchingModel& model, double fleet, double trip_time) {
    auto supply = [&](double x) { return (fleet - x) / (trip_time + model.waiting_time(x)); };
    const int n = 4096;
    double lo = fleet / n, hi = fleet * (1.0 - 1.0 / n);
    for (int round = 0; round < 40; ++round) {
        const int m = 32;
        int best = 0;
        double best_v = -kInf;
        for (int j = 0; j <= m; ++j) {
            double x = lo + (hi - lo) * j / m;
            double v = supply(x);
            if (v > best_v) {
                best_v = v;
                best = j;
            }
        }
        double step = (hi - lo) / m;
        double new_lo = lo + step * std::max(0, best - 1);
        double new_hi = lo + step * std::min(m, best + 1);
        lo = new_lo;
        hi = new_hi;
        if (hi - lo < 1e-14 * fleet)
            break;
    }
    return supply(0.5 * (lo + hi));
}

} // namespace oracle_detail

void ResidualReport::add(std::string name, double value, double tolerance) {
    bool ok = std::abs(value) <= tolerance;
    double scaled = tolerance > 0.0 ? std::abs(value) / tolerance : (value == 0.0 ? 0.0 : kInf);
    max_abs_scaled = std::max(max_abs_scaled, scaled);
    pass = pass && ok;
    entries.push_back({std::move(name), value, tolerance, ok});
}

ResidualReport check_residuals(const FragmentedEquilibrium& eq,
                               const std::vector<double>& fleets, const MarketConfig& config) {
    ResidualReport rep;
    const auto& m = config.matching;
    if (eq.Q > 0.0)
        rep.add("cost_consistency", eq.C - config.demand.inverse_demand(eq.Q), 1e-6);
    double q_sum = 0.0;
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        std::string tag = "[" + std::to_string(i) + "]";
        double w = m.waiting_time(eq.idle[i]);
        q_sum += eq.q[i];
        rep.add("conservation" + tag,
                fleets[i] - eq.idle[i] - eq.q[i] * (config.T + w), 1e-9 * fleets[i]);
        if (eq.q[i] > 0.0) {
            rep.add("indifference" + tag,
                    eq.fare[i] + config.beta * (config.T + w) - eq.C, 1e-6);
            double denom = 1.0 + eq.q[i] * m.waiting_time_derivatives(eq.idle[i]).first;
            rep.add("regime_margin" + tag, std::min(denom, 0.0), 0.0);
        }
    }
    rep.add("aggregation", q_sum - eq.Q, 1e-9 * std::max(1.0, eq.Q));
    return rep;
}

ResidualReport check_residuals(const IntegratedEquilibrium& eq,
                               const std::vector<double>& fleets, const MarketConfig& config) {
    ResidualReport rep;
    const auto& m = config.matching;
    double w = m.waiting_time(eq.pooled_idle);
    if (eq.Q > 0.0) {
        rep.add("indifference",
                config.demand.inverse_demand(eq.Q) - eq.fare - eq.tau -
                    config.beta * (config.T + w),
                1e-6);
        double denom = 1.0 + eq.Q * m.waiting_time_derivatives(eq.pooled_idle).first;
        rep.add("regime_margin", std::min(denom, 0.0), 0.0);
    }
    double share_sum = 0.0;
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        std::string tag = "[" + std::to_string(i) + "]";
        share_sum += eq.share[i];
        rep.add("conservation" + tag,
                fleets[i] - eq.idle[i] - eq.q[i] * (config.T + w), 1e-9 * fleets[i]);
        rep.add("proportionality" + tag, eq.q[i] - eq.share[i] * eq.Q,
                1e-9 * std::max(1.0, eq.Q));
    }
    rep.add("share_sum", share_sum - 1.0, 1e-12);
    return rep;
}

ResidualReport check_residuals(const MixedEquilibrium& eq, const std::vector<double>& fleets,
                               const MarketConfig& config) {
    ResidualReport rep;
    const auto& m = config.matching;
    double market_cost = config.demand.inverse_demand(eq.Q);
    double pool_wait = m.waiting_time(eq.pooled_idle);

    if (eq.Q1 > kUsedChannelFloor)
        rep.add("indifference_pool", eq.C1 - market_cost, 1e-6);
    else
        rep.add("no_undercut_pool", std::min(0.0, eq.C1 - market_cost), 1e-6);

    double idle_sum = 0.0, total_fleet = 0.0;
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        idle_sum += eq.idle[i];
        total_fleet += fleets[i];
    }
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        std::string tag = "[" + std::to_string(i) + "]";
        double w_i = m.waiting_time(eq.idle[i]);
        if (eq.direct_demand[i] > kUsedChannelFloor)
            rep.add("indifference_direct" + tag, eq.C2[i] - market_cost, 1e-6);
        else
            rep.add("no_undercut_direct" + tag, std::min(0.0, eq.C2[i] - market_cost), 1e-6);
        rep.add("conservation" + tag,
                fleets[i] - eq.idle[i] -
                    eq.integrator_demand[i] * (config.T + pool_wait) -
                    eq.direct_demand[i] * (config.T + w_i),
                1e-9 * fleets[i]);
        if (eq.Q1 > kUsedChannelFloor)
            rep.add("dispatch" + tag,
                    eq.integrator_demand[i] / eq.Q1 - eq.idle[i] / idle_sum, 1e-9);
    }
    rep.add("pool_stock", idle_sum - eq.pooled_idle, 1e-9 * total_fleet);
    rep.add("channel_split", eq.Q1 + eq.Q2 - eq.Q, 1e-9 * std::max(1.0, eq.Q));
    return rep;
}

double grid_best_response(std::size_t platform_index, const std::vector<double>& q,
                          const std::vector<double>& fleets, const MarketConfig& config,
                          std::size_t grid_size, MarketForm form, double tau, bool parallel) {
    if (platform_index >= fleets.size() || q.size() != fleets.size())
        throw DimensionError("grid best response: index or profile out of range");
    if (grid_size < 2)
        throw DomainError("grid best response: need at least two grid points");
    const auto& cfg = config;
    const auto& m = cfg.matching;
    double others = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j)
        if (j != platform_index)
            others += q[j];

    double pool_fleet = 0.0;
    for (double v : fleets)
        pool_fleet += v;

    // Integrated form: a platform perceives the pooled stock through its own
    // conservation identity, share * X + q (T + W(X)) = n, with the stock
    // constant n anchored at the profile under test. Dividing by the share
    // maps this onto the standard single-pool identity, so the same scan
    // inversion applies with a rescaled fleet.
    double share = fleets[platform_index] / pool_fleet;
    double scaled_stock = 0.0;
    if (form == MarketForm::Integrated) {
        double x0 = oracle_detail::invert_conservation(
            m, pool_fleet, others + q[platform_index], cfg.T);
        if (!(x0 > 0.0))
            throw DomainError("grid best response: profile exceeds pooled capacity");
        scaled_stock =
            (share * x0 + q[platform_index] * (cfg.T + m.waiting_time(x0))) / share;
    }

    double q_max;
    if (form == MarketForm::Fragmented)
        q_max = 0.999 * oracle_detail::scan_max_demand(m, fleets[platform_index], cfg.T);
    else
        q_max = 0.999 * share * oracle_detail::scan_max_demand(m, scaled_stock, cfg.T);
    double q_ceiling = cfg.demand.potential() * (1.0 - 1e-12);

    auto value_at = [&](long j) {
        double own = q_max * static_cast<double>(j) / (grid_size - 1);
        double total = others + own;
        if (own <= 0.0)
            return -cfg.c * fleets[platform_index];
        if (total >= q_ceiling)
            return -kInf;
        double idle =
            form == MarketForm::Fragmented
                ? oracle_detail::invert_conservation(m, fleets[platform_index], own, cfg.T)
                : oracle_detail::invert_conservation(m, scaled_stock, own / share, cfg.T);
        if (!(idle > 0.0)) // NaN: infeasible demand
            return -kInf;
        double margin = cfg.demand.inverse_demand(total) -
                        cfg.beta * (cfg.T + m.waiting_time(idle));
        if (form == MarketForm::Integrated)
            margin -= tau;
        return own * margin - cfg.c * fleets[platform_index];
    };
    long best = argmax_cells(static_cast<long>(grid_size), value_at, parallel);
    return q_max * static_cast<double>(best) / (grid_size - 1);
}

std::vector<double> grid_welfare_max(MarketForm form, const std::vector<double>& fleets,
                                     const MarketConfig& config, std::size_t grid_size,
                                     bool parallel) {
    if (grid_size < 2)
        throw DomainError("grid welfare max: need at least two grid points");
    const auto& cfg = config;
    const auto& m = cfg.matching;
    const std::size_t n = fleets.size();
    double q_ceiling = cfg.demand.potential() * (1.0 - 1e-12);
    double fleet_cost = 0.0;
    for (double v : fleets)
        fleet_cost += cfg.c * v;

    if (form == MarketForm::Integrated) {
        double pool_fleet = 0.0;
        for (double v : fleets)
            pool_fleet += v;
        double q_max = 0.999 * oracle_detail::scan_max_demand(m, pool_fleet, cfg.T);
        auto value_at = [&](long j) {
            double total = q_max * static_cast<double>(j) / (grid_size - 1);
            if (total >= q_ceiling)
                return -kInf;
            if (total <= 0.0)
                return -fleet_cost;
            double idle = oracle_detail::invert_conservation(m, pool_fleet, total, cfg.T);
            if (!(idle > 0.0))
                return -kInf;
            return cfg.demand.gross_surplus(total) -
                   total * cfg.beta * (cfg.T + m.waiting_time(idle)) - fleet_cost;
        };
        long best = argmax_cells(static_cast<long>(grid_size), value_at, parallel);
        double total = q_max * static_cast<double>(best) / (grid_size - 1);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = fleets[i] / pool_fleet * total;
        return out;
    }

    if (n > 3)
        throw DimensionError("grid welfare max: fragmented form supports up to 3 platforms");

    // Per-platform 1-D tables of demand level and time cost, so each cell of
    // the product grid is additions plus one gross-surplus evaluation.
    const long g = static_cast<long>(grid_size);
    std::vector<std::vector<double>> level(n, std::vector<double>(grid_size));
    std::vector<std::vector<double>> time_cost(n, std::vector<double>(grid_size));
    for (std::size_t i = 0; i < n; ++i) {
        double q_max = 0.999 * oracle_detail::scan_max_demand(m, fleets[i], cfg.T);
        for (long j = 0; j < g; ++j) {
            double own = q_max * static_cast<double>(j) / (grid_size - 1);
            level[i][j] = own;
            if (own <= 0.0) {
                time_cost[i][j] = 0.0;
                continue;
            }
            double idle = oracle_detail::invert_conservation(m, fleets[i], own, cfg.T);
            time_cost[i][j] =
                idle > 0.0 ? own * cfg.beta * (cfg.T + m.waiting_time(idle)) : kInf;
        }
    }

    long n_cells = 1;
    for (std::size_t i = 0; i < n; ++i)
        n_cells *= g;
    auto value_at = [&](long idx) {
        double total = 0.0, cost = 0.0;
        long rem = idx;
        for (std::size_t i = 0; i < n; ++i) {
            long j = rem % g;
            rem /= g;
            total += level[i][j];
            cost += time_cost[i][j];
        }
        if (total >= q_ceiling || cost == kInf)
            return -kInf;
        if (total <= 0.0)
            return -fleet_cost;
        return cfg.demand.gross_surplus(total) - cost - fleet_cost;
    };
    long best = argmax_cells(n_cells, value_at, parallel);
    std::vector<double> out(n);
    long rem = best;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = level[i][rem % g];
        rem /= g;
    }
    return out;
}

double finite_difference(const std::function<double(double)>& f, double point, double step) {
    if (!(step > 0.0))
        throw DomainError("finite difference: step must be positive");
    return (f(point + step) - f(point - step)) / (2.0 * step);
}

} // namespace rideq
