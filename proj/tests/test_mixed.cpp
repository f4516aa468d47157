#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rideq/errors.hpp"
#include "rideq/mixed.hpp"
#include "rideq/oracle.hpp"
#include "support.hpp"

#include <cmath>
#include <vector>

using namespace rideq;

namespace {

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

} // namespace

TEST_CASE("interior channel-choice fixture") {
    MarketConfig cfg = hk_config(fared({2000.0, 2000.0, 2000.0}, 70.0), 44.94);
    auto fleets = cfg.fleets();
    SolveInfo info;
    MixedEquilibrium eq = solve_mixed(cfg.fares(), 44.94, fleets, cfg, &info);

    CHECK(eq.regime == MixedRegime::Mixed);
    CHECK(eq.Q == doctest::Approx(5413.47288287).epsilon(1e-8));
    CHECK(eq.Q1 == doctest::Approx(2824.20753226).epsilon(1e-8));
    CHECK(eq.Q1 + eq.Q2 == doctest::Approx(eq.Q).epsilon(1e-12));
    CHECK_FALSE(info.multiple_fixed_points);

    // Passengers are indifferent across every channel in use.
    CHECK(std::abs(eq.C1 - eq.C) < 1e-6);
    for (std::size_t i = 0; i < fleets.size(); ++i)
        if (eq.direct_demand[i] > 1e-6)
            CHECK(std::abs(eq.C2[i] - eq.C) < 1e-6);

    CHECK(check_residuals(eq, fleets, cfg).pass);
}

TEST_CASE("corner regimes at extreme commissions") {
    MarketConfig cfg = hk_config(fared({2000.0, 2000.0, 2000.0}, 70.0));
    auto fleets = cfg.fleets();

    MixedEquilibrium free_ride = solve_mixed(cfg.fares(), 0.0, fleets, cfg);
    CHECK(free_ride.regime == MixedRegime::AllIntegrator);
    CHECK(free_ride.Q2 == 0.0);
    CHECK(free_ride.Q1 == doctest::Approx(free_ride.Q).epsilon(1e-12));
    CHECK(check_residuals(free_ride, fleets, cfg).pass);

    MixedEquilibrium priced_out = solve_mixed(cfg.fares(), 1000.0, fleets, cfg);
    CHECK(priced_out.regime == MixedRegime::NoIntegrator);
    CHECK(priced_out.Q1 == 0.0);
    CHECK(check_residuals(priced_out, fleets, cfg).pass);
}

TEST_CASE("adoption thresholds across the four supply scenarios") {
    struct Scenario {
        std::vector<double> fleets;
        double tau_1;
        double tau_2;
    };
    const Scenario scenarios[] = {
        {{2000.0, 2000.0, 2000.0}, 35.2411408424, 54.63104105},
        {{3000.0, 3000.0, 3000.0}, 13.2594408989, 27.2756619453},
        {{3000.0, 2000.0, 1000.0}, 28.5087075233, 54.63104105},
        {{4000.0, 3000.0, 2000.0}, 10.7155823708, 27.2756619453},
    };
    for (const auto& s : scenarios) {
        std::vector<PlatformFleet> platforms;
        for (double n : s.fleets)
            platforms.push_back({n, 70.0});
        MarketConfig cfg = hk_config(platforms);
        CommissionRange r = commission_range(cfg.fares(), s.fleets, cfg);
        CHECK(r.tau_1 == doctest::Approx(s.tau_1).epsilon(1e-6));
        CHECK(r.tau_2 == doctest::Approx(s.tau_2).epsilon(1e-6));
        CHECK(r.tau_1 < r.tau_2);
    }
}

TEST_CASE("regime bands along a commission sweep") {
    MarketConfig cfg = hk_config(fared({2000.0, 2000.0, 2000.0}, 70.0));
    auto fleets = cfg.fleets();
    CommissionRange r = commission_range(cfg.fares(), fleets, cfg);
    auto rows = sweep_commission(cfg.fares(), fleets, cfg,
                                 uniform_grid(r.tau_1 - 2.0, r.tau_2 + 2.0, 25));
    REQUIRE(rows.size() == 25);
    for (const auto& row : rows) {
        CHECK(row.ok);
        CHECK(row.error.empty());
        if (row.tau < r.tau_1 - 1e-3)
            CHECK(row.regime == MixedRegime::AllIntegrator);
        if (row.tau > r.tau_1 + 1e-3 && row.tau < r.tau_2 - 1e-3)
            CHECK(row.regime == MixedRegime::Mixed);
        if (row.tau > r.tau_2 + 1e-3)
            CHECK(row.regime == MixedRegime::NoIntegrator);
    }
}

TEST_CASE("demand response to the commission: monotone only for equal fleets") {
    // Equal fleets: inside the mixed band, realized demand never increases
    // with the commission. (Below tau_1 everyone is pooled on the congested
    // branch and a higher commission decongests, so demand rises there for
    // every scenario.)
    {
        MarketConfig cfg = hk_config(fared({2000.0, 2000.0, 2000.0}, 70.0));
        auto fleets = cfg.fleets();
        auto rows =
            sweep_commission(cfg.fares(), fleets, cfg, uniform_grid(35.5, 54.5, 25));
        for (std::size_t k = 1; k < rows.size(); ++k) {
            CHECK(rows[k].regime == MixedRegime::Mixed);
            CHECK(rows[k].Q <= rows[k - 1].Q + 1e-6 * rows[k - 1].Q);
        }
    }
    // Heterogeneous fleets sit on the congested branch at these fares; a
    // higher commission decongests the pool and realized demand can rise
    // inside the mixed band before falling again.
    {
        MarketConfig cfg = hk_config(fared({3000.0, 2000.0, 1000.0}, 70.0));
        auto fleets = cfg.fleets();
        auto rows = sweep_commission(cfg.fares(), fleets, cfg, uniform_grid(29.0, 54.0, 26));
        bool rises = false;
        for (std::size_t k = 1; k < rows.size(); ++k)
            if (rows[k].regime == MixedRegime::Mixed &&
                rows[k - 1].regime == MixedRegime::Mixed)
                rises = rises || rows[k].Q > rows[k - 1].Q + 1e-9;
        CHECK(rises);
    }
}

TEST_CASE("welfare identity with both channels active") {
    MarketConfig cfg = hk_config(fared({2000.0, 2000.0, 2000.0}, 70.0));
    auto fleets = cfg.fleets();
    MixedEquilibrium eq = solve_mixed(cfg.fares(), 44.94, fleets, cfg);
    MarketMetrics m = metrics(eq, fleets, cfg);
    CHECK(m.integrator_revenue == doctest::Approx(44.94 * eq.Q1).epsilon(1e-12));
    CHECK(m.welfare ==
          doctest::Approx(m.consumer_surplus + m.total_profit + m.integrator_revenue)
              .epsilon(1e-6));
}

TEST_CASE("argument guards") {
    MarketConfig cfg = hk_config(fared({2000.0, 2000.0, 2000.0}, 70.0));
    auto fleets = cfg.fleets();
    CHECK_THROWS_AS(solve_mixed({70.0}, 10.0, fleets, cfg), DimensionError);
    CHECK_THROWS_AS(solve_mixed(cfg.fares(), std::nan(""), fleets, cfg), ValidationError);
    CHECK_THROWS_AS(
        sweep_commission(cfg.fares(), fleets, cfg, {10.0, 5.0}), ValidationError);
}

TEST_CASE("single platform leaves no commission interval") {
    // Pooling one platform with itself brings no waiting-time advantage, so
    // any positive commission kills the integrator channel outright.
    MarketConfig cfg = hk_config(fared({2000.0}, 70.0));
    CHECK_THROWS_AS(commission_range(cfg.fares(), cfg.fleets(), cfg), DegenerateRange);
}
