#include "rideq/fragmented.hpp"

#include "rideq/detail/fixed_fare.hpp"
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
    std::vector<ConservationCurve> curves;

    Context(const std::vector<double>& fleets_, const MarketConfig& cfg)
        : config(&cfg), fleets(fleets_) {
        curves.reserve(fleets.size());
        for (double n : fleets)
            curves.emplace_back(cfg.matching, n, cfg.T);
    }
};

// Marginal value of an extra trip for platform i at total demand Q and own
// demand q: passenger willingness net of the supply-side marginal cost.
// `nash` keeps the market-power term q B'(Q); the planner drops it.
double foc_value(const Context& ctx, bool nash, double total_q, double q,
                 const ConservationCurve& curve) {
    const auto& cfg = *ctx.config;
    double idle = curve.idle_for(q);
    double b = cfg.demand.inverse_demand(total_q);
    double w = cfg.matching.waiting_time(idle);
    double wprime = cfg.matching.waiting_time_derivatives(idle).first;
    double denom = 1.0 + q * wprime;
    if (denom <= 0.0) // capacity peak: marginal supply cost diverges
        return -std::numeric_limits<double>::infinity();
    // d/dq [q (T + W(x(q)))] = -dx/dq along the conservation identity, so the
    // marginal supply cost is -beta dx/dq = beta (T + W) / (1 + q W').
    double value = b - cfg.beta * (cfg.T + w) / denom;
    if (nash)
        value += q * cfg.demand.inverse_demand_slope(total_q);
    return value;
}

// Demand at which platform i's first-order condition holds, holding the
// aggregate Q (and hence B(Q), B'(Q)) fixed. The condition value is strictly
// decreasing in q on the normal branch and diverges to -inf at the peak.
double foc_demand_at_aggregate(const Context& ctx, bool nash, double total_q, std::size_t i) {
    const auto& curve = ctx.curves[i];
    double q_lo = 1e-12 * curve.peak_demand();
    double q_hi = curve.peak_demand() * (1.0 - 1e-9);
    if (foc_value(ctx, nash, total_q, q_lo, curve) <= 0.0)
        return 0.0;
    if (foc_value(ctx, nash, total_q, q_hi, curve) >= 0.0)
        return q_hi;
    auto f = [&](double q) { return foc_value(ctx, nash, total_q, q, curve); };
    return detail::bisect(f, q_lo, q_hi, 1e-16 * curve.peak_demand());
}

// Solve the aggregate fixed point sum_i q_i(Q) = Q by bisection. The
// residual is positive for small Q (high willingness to pay) and negative
// as Q approaches the demand ceiling.
std::vector<double> aggregate_solve(const Context& ctx, bool nash) {
    const auto& cfg = *ctx.config;
    double q_bar = cfg.demand.potential();
    auto residual = [&](double total_q) {
        double s = 0.0;
        for (std::size_t i = 0; i < ctx.curves.size(); ++i)
            s += foc_demand_at_aggregate(ctx, nash, total_q, i);
        return s - total_q;
    };
    double lo = 1e-10 * q_bar;
    double hi = q_bar * (1.0 - 1e-12);
    if (residual(lo) <= 0.0)
        throw NoEquilibrium("aggregate first-order system has no interior root");
    if (residual(hi) >= 0.0)
        throw NoEquilibrium("demand ceiling binds before the first-order system clears");
    double total_q = detail::bisect(residual, lo, hi, 1e-16 * q_bar);
    std::vector<double> q(ctx.curves.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = foc_demand_at_aggregate(ctx, nash, total_q, i);
    return q;
}

// Platform i's payoff as a function of its own demand, with rivals fixed.
// Nash: own profit. Planner: the q_i-dependent part of welfare.
double objective(const Context& ctx, bool nash, std::size_t i, double q, double others_q) {
    const auto& cfg = *ctx.config;
    double total_q = others_q + q;
    double idle = ctx.curves[i].idle_for(q);
    double supply_cost = cfg.beta * (cfg.T + cfg.matching.waiting_time(idle));
    if (nash)
        return q * (cfg.demand.inverse_demand(total_q) - supply_cost);
    return cfg.demand.gross_surplus(total_q) - q * supply_cost;
}

double best_response(const Context& ctx, bool nash, std::size_t i, double others_q) {
    const auto& cfg = *ctx.config;
    double q_cap = std::min(ctx.curves[i].peak_demand() * (1.0 - 1e-9),
                            cfg.demand.potential() * (1.0 - 1e-12) - others_q);
    if (q_cap <= 0.0)
        return 0.0;
    auto f = [&](double q) { return objective(ctx, nash, i, q, others_q); };
    return detail::golden_max(f, 0.0, q_cap, 1e-11 * ctx.curves[i].peak_demand());
}

struct BrOutcome {
    std::vector<double> q;
    bool converged = false;
    int iterations = 0;
};

BrOutcome damped_best_response(const Context& ctx, bool nash, double start_fraction) {
    const auto& cfg = *ctx.config;
    const std::size_t n = ctx.curves.size();
    double tol = 1e-10 * cfg.demand.potential();

    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i)
        q[i] = start_fraction * ctx.curves[i].peak_demand();

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
            double br = best_response(ctx, nash, i, total_q - q[i]);
            next[i] = (1.0 - kBrDamping) * q[i] + kBrDamping * br;
        }
        // Platforms with equal fleets share one best-response map; averaging
        // their iterates removes spurious asymmetric drift.
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

bool profiles_match(const std::vector<double>& a, const std::vector<double>& b, double scale) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-6 * scale)
            return false;
    return true;
}

FragmentedEquilibrium assemble(const Context& ctx, const std::vector<double>& q) {
    const auto& cfg = *ctx.config;
    FragmentedEquilibrium eq;
    const std::size_t n = q.size();
    eq.q = q;
    eq.idle.resize(n);
    eq.fare.resize(n);
    eq.wait.resize(n);
    eq.regime.resize(n);
    eq.Q = 0.0;
    for (double v : q)
        eq.Q += v;
    eq.C = eq.Q > 0.0 ? cfg.demand.inverse_demand(eq.Q) : cfg.demand.inverse_demand(1e-300);
    for (std::size_t i = 0; i < n; ++i) {
        eq.idle[i] = q[i] > 0.0 ? ctx.curves[i].idle_for(q[i]) : ctx.fleets[i];
        eq.wait[i] = cfg.matching.waiting_time(eq.idle[i]);
        eq.fare[i] = eq.C - cfg.beta * (cfg.T + eq.wait[i]);
        eq.regime[i] = wgc_classify(cfg.matching, q[i], eq.idle[i], 1.0, PoolMode::Platform);
    }
    return eq;
}

FragmentedSolution solve_impl(const std::vector<double>& fleets, const MarketConfig& config,
                              bool nash) {
    config.validate();
    if (fleets.empty())
        throw DimensionError("at least one fleet required");
    Context ctx(fleets, config);

    SolveInfo info;
    std::vector<std::vector<double>> fixed_points;
    for (double f : kRestartFractions) {
        BrOutcome out = damped_best_response(ctx, nash, f);
        ++info.restarts;
        info.iterations = std::max(info.iterations, out.iterations);
        if (!out.converged)
            continue;
        info.best_response_converged = true;
        bool seen = false;
        for (const auto& fp : fixed_points)
            seen = seen || profiles_match(fp, out.q, config.demand.potential());
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

    // Polish (or replace) with the aggregate bisection, which drives the
    // first-order residuals to machine level.
    std::vector<double> q = aggregate_solve(ctx, nash);
    if (info.best_response_converged &&
        !profiles_match(fixed_points.front(), q, 1e3 * config.demand.potential()))
        info.warnings.push_back("best-response and aggregate solutions disagree");

    FragmentedSolution sol;
    sol.eq = assemble(ctx, q);
    sol.info = info;
    sol.info.strategic_demand = q;
    sol.info.foc_residuals.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        sol.info.foc_residuals[i] =
            q[i] > 0.0 ? foc_value(ctx, nash, sol.eq.Q, q[i], ctx.curves[i]) : 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (sol.eq.regime[i] != Regime::Normal && q[i] > 0.0)
            throw RegimeError("solved fragmented equilibrium left the normal regime");
    sol.metrics = metrics(sol.eq, fleets, config);
    return sol;
}

} // namespace

FragmentedEquilibrium evaluate_given_fares(const std::vector<double>& fares,
                                           const std::vector<double>& fleets,
                                           const MarketConfig& config) {
    config.validate();
    if (fares.size() != fleets.size())
        throw DimensionError("fare vector length does not match fleet vector");
    for (double f : fares)
        if (f < 0.0)
            throw ValidationError("fares must be nonnegative");

    // Normal-regime contract: the clearing cost may not exceed any active
    // platform's peak-capacity cost, where its idle stock would cross below
    // the feasibility peak.
    Context ctx(fleets, config);
    const auto& cfg = config;
    double cost_cap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        double peak_cost = fares[i] + cfg.beta *
                                          (cfg.T + cfg.matching.waiting_time(
                                                       ctx.curves[i].peak_idle()));
        cost_cap = std::min(cost_cap, peak_cost);
    }
    auto st = detail::fragmented_clearing(cfg.demand, cfg.matching, fleets, fares, cfg.beta,
                                          cfg.T);
    if (st.C > cost_cap + 1e-9)
        throw NoEquilibrium("fares clear the market only beyond a platform's normal branch");

    FragmentedEquilibrium eq;
    eq.q = st.q;
    eq.idle = st.idle;
    eq.fare = fares;
    eq.Q = st.Q;
    eq.C = st.C;
    eq.wait.resize(fleets.size());
    eq.regime.resize(fleets.size());
    for (std::size_t i = 0; i < fleets.size(); ++i) {
        eq.wait[i] = cfg.matching.waiting_time(eq.idle[i]);
        eq.regime[i] = wgc_classify(cfg.matching, eq.q[i], eq.idle[i], 1.0, PoolMode::Platform);
    }
    return eq;
}

FragmentedSolution solve_fragmented_nash(const std::vector<double>& fleets, const MarketConfig& config) {
    return solve_impl(fleets, config, true);
}

FragmentedSolution solve_fragmented_optimum(const std::vector<double>& fleets,
                                        const MarketConfig& config) {
    return solve_impl(fleets, config, false);
}

double commission_headroom(double q_fragmented, double q_integrated, int platform_count,
                           const DemandCurve& demand) {
    if (platform_count < 1)
        throw DomainError("platform count must be at least 1");
    if (q_fragmented <= 0.0 || q_integrated <= 0.0)
        throw DomainError("commission headroom needs positive equilibrium demands");
    double inv_i = 1.0 / platform_count;
    double at_int = demand.inverse_demand(q_integrated) +
                    inv_i * q_integrated * demand.inverse_demand_slope(q_integrated);
    double at_frag = demand.inverse_demand(q_fragmented) +
                     inv_i * q_fragmented * demand.inverse_demand_slope(q_fragmented);
    return at_int - at_frag;
}

MarketMetrics metrics(const FragmentedEquilibrium& eq, const std::vector<double>& fleets,
                      const MarketConfig& config) {
    MarketMetrics m;
    const std::size_t n = fleets.size();
    m.profit.resize(n);
    m.utilization.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.profit[i] = eq.q[i] * eq.fare[i] - config.c * fleets[i];
        m.utilization[i] = eq.q[i] * config.T / fleets[i];
        m.total_profit += m.profit[i];
    }
    double gross = config.demand.gross_surplus(eq.Q);
    m.consumer_surplus = eq.Q > 0.0 ? gross - eq.Q * eq.C : 0.0;
    m.integrator_revenue = 0.0;
    m.welfare = gross;
    for (std::size_t i = 0; i < n; ++i)
        m.welfare -= eq.q[i] * config.beta * (config.T + eq.wait[i]) + config.c * fleets[i];
    return m;
}

} // namespace rideq
