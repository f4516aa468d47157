#include "rideq/demand.hpp"

#include "rideq/errors.hpp"

#include <cmath>
#include <string>

namespace rideq {

ExponentialDemand::ExponentialDemand(double q_bar, double alpha)
    : q_bar_(q_bar), alpha_(alpha) {
    if (!(q_bar > 0.0))
        throw DomainError("demand: potential must be positive, got " + std::to_string(q_bar));
    if (!(alpha > 0.0))
        throw DomainError("demand: cost sensitivity must be positive, got " + std::to_string(alpha));
}

double ExponentialDemand::realized_demand(double cost) const {
    return q_bar_ * std::exp(-alpha_ * cost);
}

double ExponentialDemand::inverse_demand(double q) const {
    if (!(q > 0.0) || q > q_bar_)
        throw DomainError("inverse_demand: demand rate outside (0, potential]");
    return -std::log(q / q_bar_) / alpha_;
}

double ExponentialDemand::inverse_demand_slope(double q) const {
    if (!(q > 0.0))
        throw DomainError("inverse_demand_slope: demand rate must be positive");
    return -1.0 / (alpha_ * q);
}

double ExponentialDemand::gross_surplus(double q) const {
    if (q < 0.0 || q > q_bar_)
        throw DomainError("gross_surplus: demand rate outside [0, potential]");
    if (q == 0.0)
        return 0.0;
    // Closed form of the integral of B: Q * (B(Q) + 1/alpha).
    return q * (inverse_demand(q) + 1.0 / alpha_);
}

} // namespace rideq
