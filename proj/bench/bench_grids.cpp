// Times the OpenMP grid oracles against the serial reference paths and
// verifies that both return identical results.

#include "rideq/oracle.hpp"

#include <chrono>
#include <cstdio>
#include <vector>

using namespace rideq;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <class Fn>
double timed(const char* label, Fn&& fn) {
    auto t0 = clock_type::now();
    fn();
    double s = seconds_since(t0);
    std::printf("%-42s %8.3f s\n", label, s);
    return s;
}

} // namespace

int main() {
    MarketConfig config{ExponentialDemand(1e5, 0.013),
                        MatchingModel(5.0, 0.5),
                        120.0,
                        50.0,
                        0.4,
                        0.0,
                        {{500.0, std::nullopt}, {400.0, std::nullopt}, {300.0, std::nullopt}}};
    std::vector<double> fleets{500.0, 400.0, 300.0};
    std::vector<double> profile{439.0, 330.0, 227.0};

    std::printf("grid oracles, serial reference vs OpenMP\n\n");

    std::vector<double> w_serial, w_parallel;
    double t_ws = timed("welfare grid 501^3 cells, serial", [&] {
        w_serial = grid_welfare_max(MarketForm::Fragmented, fleets, config, 501, false);
    });
    double t_wp = timed("welfare grid 501^3 cells, parallel", [&] {
        w_parallel = grid_welfare_max(MarketForm::Fragmented, fleets, config, 501, true);
    });

    double br_serial = 0.0, br_parallel = 0.0;
    double t_bs = timed("best-response grid 20001 cells, serial", [&] {
        br_serial =
            grid_best_response(0, profile, fleets, config, 20001, MarketForm::Fragmented,
                               0.0, false);
    });
    double t_bp = timed("best-response grid 20001 cells, parallel", [&] {
        br_parallel =
            grid_best_response(0, profile, fleets, config, 20001, MarketForm::Fragmented,
                               0.0, true);
    });

    bool identical = br_serial == br_parallel;
    for (std::size_t i = 0; i < w_serial.size(); ++i)
        identical = identical && w_serial[i] == w_parallel[i];
    std::printf("\nresults identical: %s\n", identical ? "yes" : "NO");
    std::printf("speedup: welfare %.2fx, best response %.2fx\n", t_ws / t_wp, t_bs / t_bp);
    return identical ? 0 : 1;
}
