#include "rideq/market.hpp"

#include "rideq/errors.hpp"

#include <string>

namespace rideq {

void MarketConfig::validate() const {
    if (!(beta > 0.0))
        throw ValidationError("config.beta: must be positive");
    if (!(c > 0.0))
        throw ValidationError("config.c: must be positive");
    if (!(T > 0.0))
        throw ValidationError("config.T: must be positive");
    if (platforms.empty())
        throw ValidationError("config.platforms: at least one platform required");
    for (std::size_t i = 0; i < platforms.size(); ++i) {
        if (!(platforms[i].fleet > 0.0))
            throw ValidationError("config.platforms[" + std::to_string(i) +
                                  "].fleet: must be positive");
        if (platforms[i].fare && *platforms[i].fare < 0.0)
            throw ValidationError("config.platforms[" + std::to_string(i) +
                                  "].fare: must be nonnegative");
    }
}

} // namespace rideq
