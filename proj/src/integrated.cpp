#include "rideq/integrated.hpp"

#include "rideq/detail/scalar.hpp"
#include "rideq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rideq {

namespace {

constexpr double kBrDamping = 0.5;
constexpr double kRestartFractions[] = {0.1, 0.3, 0.5, 0.7, 0.9};
constexpr int kMaxBrIterations = 500;

struct Context {
    const MarketConfig* config;
    std::vector<double> fleets;
    std::vector<double> shares;
    double total_fleet;
    ConservationCurve pool;
    double tau;

    Context(const std::vector<double>& fleets_, const MarketConfig& cfg, double tau_)
        : config(&cfg), fleets(fleets_), total_fleet(0.0),
          pool(cfg.matching, [&] {
              double n = 0.0;
              for (double v : fleets_)
                  n += v;
              return n;
          }(), cfg.T),
          tau(tau_) {
        for (double v : fleets)
            total_fleet += v;
        shares.reserve(fleets.size());
        for (double v : fleets)
            shares.push_back(v / total_fleet);
    }
};

// Strategic first-order condition for platform i at total demand Q: marginal
// revenue net of commission and of the pooled-stock marginal supply cost,
// which carries the fleet share through the dispatch rule.
double foc_value(const Context& ctx, double total_q, double q, double share) {
    const auto& cfg = *ctx.config;
    double idle = ctx.pool.idle_for(total_q);
    double w = cfg.matching.waiting_time(idle);
    double wprime = cfg.matching.waiting_time_derivatives(idle).first;
    double denom = share + q * wprime;
    return cfg.demand.inverse_demand(total_q) + q * cfg.demand.inverse_demand_slope(total_q) -
           ctx.tau - share * cfg.beta * (cfg.T + w) / denom;
}

double foc_demand_at_aggregate(const Context& ctx, double total_q, std::size_t i) {
    const auto& cfg = *ctx.config;
    double share = ctx.shares[i];
    double idle = ctx.pool.idle_for(total_q);
    double wprime = cfg.matching.waiting_time_derivatives(idle).first;
    // The share-regime denominator vanishes at q = -share / W'(x), where the
    // condition value diverges to -inf.
    double q_hi = (-share / wprime) * (1.0 - 1e-9);
    double q_lo = 1e-12 * ctx.pool.peak_demand();
    if (foc_value(ctx, total_q, q_lo, share) <= 0.0)
        return 0.0;
    if (foc_value(ctx, total_q, q_hi, share) >= 0.0)
        return q_hi;
    auto f = [&](double q) { return foc_value(ctx, total_q, q, share); };
    return detail::bisect(f, q_lo, q_hi, 1e-16 * ctx.pool.peak_demand());
}

std::vector<double> aggregate_solve(const Context& ctx) {
    const auto& cfg = *ctx.config;
    double q_bar = cfg.demand.potential();
    auto residual = [&](double total_q) {
        double s = 0.0;
        for (std::size_t i = 0; i < ctx.shares.size(); ++i)
            s += foc_demand_at_aggregate(ctx, total_q, i);
        return s - total_q;
    };
    double lo = 1e-10 * q_bar;
    double hi = std::min(ctx.pool.peak_demand() * (1.0 - 1e-9), q_bar * (1.0 - 1e-12));
    if (residual(lo) <= 0.0)
        throw NoEquilibrium("integrated first-order system has no interior root");
    if (residual(hi) >= 0.0)
        throw NoEquilibrium("pooled capacity binds before the first-order system clears");
    // The first-order values are steep in the aggregate near the capacity
    // peak, so the aggregate root is driven close to the floating-point
    // floor to keep the per-platform residuals at machine level.
    double total_q = detail::bisect(residual, lo, hi, 1e-16 * q_bar);
    std::vector<double> q(ctx.shares.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = foc_demand_at_aggregate(ctx, total_q, i);
    return q;
}

double profit_objective(const Context& ctx, std::size_t, double q, double others_q) {
    const auto& cfg = *ctx.config;
    double total_q = others_q + q;
    double idle = ctx.pool.idle_for(total_q);
    double supply_cost = cfg.beta * (cfg.T + cfg.matching.waiting_time(idle));
    return q * (cfg.demand.inverse_demand(total_q) - supply_cost - ctx.tau);
}

double best_response(const Context& ctx, std::size_t i, double others_q) {
    const auto& cfg = *ctx.config;
    double q_cap = std::min(ctx.pool.peak_demand() * (1.0 - 1e-9) - others_q,
                            cfg.demand.potential() * (1.0 - 1e-12) - others_q);
    if (q_cap <= 0.0)
        return 0.0;
    auto f = [&](double q) { return profit_objective(ctx, i, q, others_q); };
    return detail::golden_max(f, 0.0, q_cap, 1e-11 * ctx.pool.peak_demand());
}

struct BrOutcome {
    std::vector<double> q;
    bool converged = false;
    int iterations = 0;
};

BrOutcome damped_best_response(const Context& ctx, double start_fraction) {
    const auto& cfg = *ctx.config;
    const std::size_t n = ctx.shares.size();
    double tol = 1e-10 * cfg.demand.potential();

    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i)
        q[i] = start_fraction * ctx.shares[i] * ctx.pool.peak_demand();

    BrOutcome out;
    for (int it = 0; it < kMaxBrIterations; ++it) {
        double total_q = 0.0;
        for (double v : q)
            total_q += v;
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            // Equal-fleet platforms with equal iterates share one best
            // response; reuse it instead of recomputing.
            bool reused = false;
            for (std::size_t j = 0; j < i && !reused; ++j) {
                if (ctx.fleets[j] == ctx.fleets[i] && q[j] == q[i]) {
                    next[i] = next[j];
                    reused = true;
                }
            }
            if (reused)
                continue;
            double br = best_response(ctx, i, total_q - q[i]);
            next[i] = (1.0 - kBrDamping) * q[i] + kBrDamping * br;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double sum = next[i];
            int count = 1;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && ctx.fleets[j] == ctx.fleets[i]) {
                    sum += next[j];
                    ++count;
                }
            }
            next[i] = sum / count;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            delta = std::max(delta, std::abs(next[i] - q[i]));
        q = std::move(next);
        out.iterations = it + 1;
        if (delta < tol) {
            out.converged = true;
            break;
        }
    }
    out.q = std::move(q);
    return out;
}

IntegratedEquilibrium assemble(const Context& ctx, double total_q) {
    const auto& cfg = *ctx.config;
    IntegratedEquilibrium eq;
    eq.tau = ctx.tau;
    eq.Q = total_q;
    eq.share = ctx.shares;
    eq.pooled_idle = total_q > 0.0 ? ctx.pool.idle_for(total_q) : ctx.total_fleet;
    double wait = cfg.matching.waiting_time(eq.pooled_idle);
    eq.fare = total_q > 0.0
                  ? cfg.demand.inverse_demand(total_q) - cfg.beta * (cfg.T + wait) - ctx.tau
                  : 0.0;
    eq.q.resize(ctx.shares.size());
    eq.idle.resize(ctx.shares.size());
    for (std::size_t i = 0; i < ctx.shares.size(); ++i) {
        eq.q[i] = ctx.shares[i] * total_q;
        eq.idle[i] = ctx.shares[i] * eq.pooled_idle;
    }
    if (total_q > 0.0 &&
        wgc_classify(cfg.matching, total_q, eq.pooled_idle, 1.0, PoolMode::PooledTotal) !=
            Regime::Normal)
        throw RegimeError("integrated solution left the normal regime of the pooled curve");
    return eq;
}

} // namespace

IntegratedEquilibrium evaluate_given_fares(const std::vector<double>& fares, double tau,
                                           const std::vector<double>& fleets,
                                           const MarketConfig& config) {
    config.validate();
    if (fares.size() != fleets.size())
        throw DimensionError("fare vector length does not match fleet vector");
    if (!std::isfinite(tau))
        throw ValidationError("commission must be finite");
    Context ctx(fleets, config, tau);
    double effective_fare = 0.0;
    for (std::size_t i = 0; i < fleets.size(); ++i)
        effective_fare += ctx.shares[i] * fares[i];

    const auto& cfg = config;
    auto gap = [&](double total_q) {
        double idle = ctx.pool.idle_for(total_q);
        return cfg.demand.inverse_demand(total_q) - effective_fare - tau -
               cfg.beta * (cfg.T + cfg.matching.waiting_time(idle));
    };
    double q_bar = cfg.demand.potential();
    double lo = 1e-10 * q_bar;
    double hi = std::min(ctx.pool.peak_demand() * (1.0 - 1e-9), q_bar * (1.0 - 1e-12));
    if (gap(lo) <= 0.0)
        return assemble(ctx, 0.0); // fares at or above the choke cost
    if (gap(hi) >= 0.0)
        throw NoEquilibrium("fares clear the pooled market only beyond its normal branch");
    double total_q = detail::bisect(gap, lo, hi, 1e-13 * q_bar);
    IntegratedEquilibrium eq = assemble(ctx, total_q);
    eq.fare = effective_fare;
    return eq;
}

IntegratedSolution solve_integrated_nash(double tau, const std::vector<double>& fleets,
                              const MarketConfig& config) {
    config.validate();
    if (!std::isfinite(tau))
        throw ValidationError("commission must be finite");
    Context ctx(fleets, config, tau);

    SolveInfo info;
    std::vector<std::vector<double>> fixed_points;
    for (double f : kRestartFractions) {
        BrOutcome out = damped_best_response(ctx, f);
        ++info.restarts;
        info.iterations = std::max(info.iterations, out.iterations);
        if (!out.converged)
            continue;
        info.best_response_converged = true;
        bool seen = false;
        for (const auto& fp : fixed_points) {
            bool same = true;
            for (std::size_t i = 0; i < fp.size(); ++i)
                same = same && std::abs(fp[i] - out.q[i]) <= 1e-6 * config.demand.potential();
            seen = seen || same;
        }
        if (!seen)
            fixed_points.push_back(out.q);
    }
    if (fixed_points.size() > 1) {
        info.multiple_fixed_points = true;
        info.warnings.push_back("best-response iteration reached multiple fixed points");
    }
    if (!info.best_response_converged)
        info.warnings.push_back(
            "best-response iteration did not converge; using aggregate bisection only");

    std::vector<double> q = aggregate_solve(ctx);
    double total_q = 0.0;
    for (double v : q)
        total_q += v;

    IntegratedSolution sol;
    sol.eq = assemble(ctx, total_q);
    sol.info = info;
    sol.info.strategic_demand = q;
    sol.info.foc_residuals.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        sol.info.foc_residuals[i] =
            q[i] > 0.0 ? foc_value(ctx, total_q, q[i], ctx.shares[i]) : 0.0;
    sol.metrics = metrics(sol.eq, fleets, config);
    return sol;
}

IntegratedSolution solve_integrated_optimum(const std::vector<double>& fleets,
                                        const MarketConfig& config) {
    config.validate();
    Context ctx(fleets, config, 0.0);
    const auto& cfg = config;
    auto foc = [&](double total_q) {
        double idle = ctx.pool.idle_for(total_q);
        double w = cfg.matching.waiting_time(idle);
        double wprime = cfg.matching.waiting_time_derivatives(idle).first;
        double denom = 1.0 + total_q * wprime;
        if (denom <= 0.0) // capacity peak
            return -std::numeric_limits<double>::infinity();
        return cfg.demand.inverse_demand(total_q) - cfg.beta * (cfg.T + w) / denom;
    };
    double q_bar = cfg.demand.potential();
    double lo = 1e-10 * q_bar;
    double hi = std::min(ctx.pool.peak_demand() * (1.0 - 1e-9), q_bar * (1.0 - 1e-12));
    if (foc(lo) <= 0.0)
        throw NoEquilibrium("planner problem has no interior optimum");
    if (foc(hi) >= 0.0)
        throw NoEquilibrium("pooled capacity binds before the planner optimum");
    double total_q = detail::bisect(foc, lo, hi, 1e-13 * q_bar);

    IntegratedSolution sol;
    sol.eq = assemble(ctx, total_q);
    sol.info.best_response_converged = true;
    sol.info.iterations = 1;
    sol.info.foc_residuals.assign(fleets.size(), foc(total_q));
    sol.info.strategic_demand = sol.eq.q;
    sol.metrics = metrics(sol.eq, fleets, config);
    return sol;
}

IntegratedSolution unchanged_fare_outcome(const std::vector<double>& fares, double tau,
                                          const std::vector<double>& fleets,
                                          const MarketConfig& config) {
    IntegratedSolution sol;
    sol.eq = evaluate_given_fares(fares, tau, fleets, config);
    sol.metrics = metrics(sol.eq, fleets, config);
    // Per-platform profits at the platforms' own (unchanged) fares rather
    // than the common effective fare.
    sol.metrics.total_profit = 0.0;
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        sol.metrics.profit[i] = sol.eq.q[i] * fares[i] - config.c * fleets[i];
        sol.metrics.total_profit += sol.metrics.profit[i];
    }
    sol.info.best_response_converged = true;
    sol.info.iterations = 1;
    return sol;
}

MarketMetrics metrics(const IntegratedEquilibrium& eq, const std::vector<double>& fleets,
                      const MarketConfig& config) {
    MarketMetrics m;
    const std::size_t n = fleets.size();
    double wait = config.matching.waiting_time(eq.pooled_idle);
    m.profit.resize(n);
    m.utilization.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.profit[i] = eq.q[i] * eq.fare - config.c * fleets[i];
        m.utilization[i] = eq.q[i] * config.T / fleets[i];
        m.total_profit += m.profit[i];
    }
    double gross = config.demand.gross_surplus(eq.Q);
    m.consumer_surplus =
        eq.Q > 0.0 ? gross - eq.Q * config.demand.inverse_demand(eq.Q) : 0.0;
    m.integrator_revenue = eq.tau * eq.Q;
    double total_fleet = 0.0;
    for (double v : fleets)
        total_fleet += v;
    m.welfare = gross - eq.Q * config.beta * (config.T + wait) - config.c * total_fleet;
    return m;
}

} // namespace rideq
