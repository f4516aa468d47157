#pragma once

// Demand side of the market: realized demand as a function of generalized
// trip cost, the inverse demand curve B(Q), its slope, and the gross-surplus
// integral used by every welfare computation.

namespace rideq {

// Abstract demand contract. Solvers only ever see this interface, so
// alternative demand families can be added without touching them.
class DemandCurve {
public:
    virtual ~DemandCurve() = default;

    // Potential demand rate (trips/hour) at zero generalized cost.
    virtual double potential() const = 0;

    // Trips/hour demanded at generalized cost C (HKD). Total function;
    // negative C extrapolates.
    virtual double realized_demand(double cost) const = 0;

    // Generalized cost B(Q) supporting demand rate Q, 0 < Q <= potential().
    virtual double inverse_demand(double q) const = 0;

    // B'(Q), always negative.
    virtual double inverse_demand_slope(double q) const = 0;

    // Integral of B from 0 to Q (HKD/hour), 0 <= Q <= potential().
    virtual double gross_surplus(double q) const = 0;
};

// Negative-exponential demand: Q(C) = q_bar * exp(-alpha * C).
class ExponentialDemand final : public DemandCurve {
public:
    ExponentialDemand(double q_bar, double alpha);

    double potential() const override { return q_bar_; }
    double realized_demand(double cost) const override;
    double inverse_demand(double q) const override;
    double inverse_demand_slope(double q) const override;
    double gross_surplus(double q) const override;

    double alpha() const { return alpha_; }

private:
    double q_bar_;
    double alpha_;
};

} // namespace rideq
