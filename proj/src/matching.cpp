#include "rideq/matching.hpp"

#include "rideq/detail/scalar.hpp"
#include "rideq/errors.hpp"

#include <cmath>
#include <string>

namespace rideq {

MatchingModel::MatchingModel(double A_, double kappa_) : A(A_), kappa(kappa_) {
    if (!(A > 0.0))
        throw DomainError("matching: constant A must be positive");
    if (!(kappa > 0.0) || kappa > 1.0)
        throw DomainError("matching: exponent kappa must lie in (0, 1]");
}

double MatchingModel::waiting_time(double idle) const {
    if (!(idle > 0.0))
        throw DomainError("waiting_time: idle count must be positive");
    return A * std::pow(idle, -kappa);
}

MatchingModel::Derivatives MatchingModel::waiting_time_derivatives(double idle) const {
    if (!(idle > 0.0))
        throw DomainError("waiting_time_derivatives: idle count must be positive");
    double first = -kappa * A * std::pow(idle, -(kappa + 1.0));
    double second = kappa * (kappa + 1.0) * A * std::pow(idle, -(kappa + 2.0));
    return {first, second};
}

ConservationCurve::ConservationCurve(const MatchingModel& model, double fleet, double trip_time)
    : model_(&model), fleet_(fleet), trip_time_(trip_time) {
    if (!(fleet > 0.0))
        throw DomainError("conservation: fleet must be positive");
    if (!(trip_time > 0.0))
        throw DomainError("conservation: trip time must be positive");
    double lo = 1e-12 * fleet;
    peak_idle_ = detail::golden_max([this](double x) { return demand_at(x); }, lo, fleet,
                                    1e-12 * fleet);
    peak_demand_ = demand_at(peak_idle_);
}

double ConservationCurve::demand_at(double idle) const {
    return (fleet_ - idle) / (trip_time_ + model_->waiting_time(idle));
}

double ConservationCurve::idle_for(double q) const {
    if (q < 0.0)
        throw DomainError("idle_for: demand rate must be nonnegative");
    if (q == 0.0)
        return fleet_;
    if (q > peak_demand_ * (1.0 + 1e-9))
        throw InfeasibleDemand("demand " + std::to_string(q) + " exceeds feasibility peak " +
                               std::to_string(peak_demand_) + " for fleet " +
                               std::to_string(fleet_));
    if (q >= peak_demand_ * (1.0 - 1e-9))
        return peak_idle_;
    // demand_at is strictly decreasing on [peak_idle, fleet] from the peak
    // value down to 0, so the bracket is guaranteed.
    return detail::bisect([this, q](double x) { return demand_at(x) - q; }, peak_idle_, fleet_,
                          1e-15 * fleet_);
}

double ConservationCurve::wgc_idle_for(double q) const {
    if (!(q > 0.0))
        throw DomainError("wgc_idle_for: demand rate must be positive");
    if (q > peak_demand_ * (1.0 + 1e-9))
        throw InfeasibleDemand("demand exceeds feasibility peak");
    if (q >= peak_demand_ * (1.0 - 1e-9))
        return peak_idle_;
    // demand_at rises from ~0 to the peak on (0, peak_idle].
    double lo = 1e-12 * fleet_;
    while (demand_at(lo) > q)
        lo *= 0.5;
    return detail::bisect([this, q](double x) { return q - demand_at(x); }, lo, peak_idle_,
                          1e-13 * fleet_);
}

namespace {

IdleSolution solve_idle(const MatchingModel& model, double fleet, double q, double trip_time) {
    ConservationCurve curve(model, fleet, trip_time);
    double idle = curve.idle_for(q);
    double residual = fleet - idle - q * (trip_time + model.waiting_time(idle));
    Regime regime = wgc_classify(model, q, idle, 1.0, PoolMode::Platform);
    return {idle, regime, residual};
}

} // namespace

IdleSolution solve_idle_platform(const MatchingModel& model, double fleet, double q,
                                 double trip_time) {
    return solve_idle(model, fleet, q, trip_time);
}

IdleSolution solve_idle_pooled(const MatchingModel& model, double total_fleet, double total_q,
                               double trip_time) {
    return solve_idle(model, total_fleet, total_q, trip_time);
}

double max_feasible_demand(const MatchingModel& model, double fleet, double trip_time) {
    return ConservationCurve(model, fleet, trip_time).peak_demand();
}

Regime wgc_classify(const MatchingModel& model, double q, double idle, double share,
                    PoolMode mode) {
    double wp = model.waiting_time_derivatives(idle).first;
    double denom = (mode == PoolMode::PooledShare ? share : 1.0) + q * wp;
    return denom > 0.0 ? Regime::Normal : Regime::WGC;
}

IdleSensitivity idle_sensitivity(const MatchingModel& model, double q, double idle,
                                 double trip_time, double share, PoolMode mode) {
    auto [wp, wpp] = model.waiting_time_derivatives(idle);
    double s = (mode == PoolMode::PooledShare) ? share : 1.0;
    double denom = s + q * wp;
    if (denom <= 0.0)
        throw RegimeError("idle_sensitivity: point is in the WGC regime");
    double w = model.waiting_time(idle);
    double first = -(trip_time + w) / denom;
    double second = -first * (2.0 * wp + q * wpp * first) / denom;
    return {first, second};
}

double evaluate_branch_curve(const MatchingModel& model, BranchKind kind, double x,
                             double fleet_i, double fleet_total, double trip_time) {
    switch (kind) {
    case BranchKind::PlatformSupply:
        if (!(x > 0.0))
            throw DomainError("branch curve: x must be positive");
        return (fleet_i - x) / (trip_time + model.waiting_time(x));
    case BranchKind::IdleRatio:
        if (!(x > 0.0) || !(x < 1.0))
            throw DomainError("branch curve: idle ratio must lie in (0, 1)");
        return (1.0 - x) * trip_time / (trip_time + model.waiting_time(fleet_i * x));
    case BranchKind::PooledShareSupply:
        if (!(x > 0.0))
            throw DomainError("branch curve: x must be positive");
        return (fleet_i - (fleet_i / fleet_total) * x) /
               (trip_time + model.waiting_time(x));
    case BranchKind::PooledSupply:
        if (!(x > 0.0))
            throw DomainError("branch curve: x must be positive");
        return (fleet_total - x) / (trip_time + model.waiting_time(x));
    }
    throw DomainError("branch curve: unknown kind");
}

} // namespace rideq
