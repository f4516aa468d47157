#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rideq/errors.hpp"
#include "rideq/fragmented.hpp"
#include "rideq/oracle.hpp"
#include "support.hpp"

#include <cmath>

using namespace rideq;

TEST_CASE("monopoly equilibrium and optimum") {
    MarketConfig cfg = hk_config(fleets_only({20000.0}));
    auto fleets = cfg.fleets();

    FragmentedSolution ne = solve_fragmented_nash(fleets, cfg);
    CHECK(ne.eq.Q == doctest::Approx(17913.5246003).epsilon(1e-9));
    CHECK(ne.eq.fare[0] == doctest::Approx(78.8047903384).epsilon(1e-9));
    CHECK(ne.metrics.welfare == doctest::Approx(1789634.98114).epsilon(1e-9));
    CHECK(check_residuals(ne.eq, fleets, cfg).pass);

    FragmentedSolution so = solve_fragmented_optimum(fleets, cfg);
    CHECK(so.eq.Q == doctest::Approx(33306.1533777).epsilon(1e-9));
    CHECK(so.metrics.welfare == doctest::Approx(2466664.11609).epsilon(1e-9));
    CHECK(check_residuals(so.eq, fleets, cfg).pass);

    // The monopolist withholds supply and prices above the planner.
    CHECK(ne.eq.Q < so.eq.Q);
    CHECK(ne.eq.fare[0] > so.eq.fare[0]);
    CHECK(ne.metrics.welfare < so.metrics.welfare);
    CHECK(ne.metrics.total_profit > so.metrics.total_profit);
}

TEST_CASE("three-platform equilibrium fixture") {
    MarketConfig cfg = hk_config(fleets_only({500.0, 400.0, 300.0}));
    auto fleets = cfg.fleets();

    FragmentedSolution ne = solve_fragmented_nash(fleets, cfg);
    CHECK(ne.eq.Q == doctest::Approx(995.445062793).epsilon(1e-9));
    CHECK(ne.eq.q[0] == doctest::Approx(439.113049034).epsilon(1e-9));
    CHECK(ne.eq.q[1] == doctest::Approx(329.624323371).epsilon(1e-9));
    CHECK(ne.eq.q[2] == doctest::Approx(226.707690388).epsilon(1e-9));
    CHECK(ne.metrics.welfare == doctest::Approx(266246.653778).epsilon(1e-9));

    FragmentedSolution so = solve_fragmented_optimum(fleets, cfg);
    CHECK(so.eq.Q == doctest::Approx(997.78015974).epsilon(1e-9));
    CHECK(so.metrics.welfare == doctest::Approx(266281.33509).epsilon(1e-9));
    CHECK(so.metrics.welfare > ne.metrics.welfare);

    for (const auto& sol : {ne, so}) {
        // Larger fleets carry more demand and hold more idle vehicles.
        CHECK(sol.eq.q[0] > sol.eq.q[1]);
        CHECK(sol.eq.q[1] > sol.eq.q[2]);
        CHECK(sol.eq.idle[0] > sol.eq.idle[1]);
        CHECK(sol.eq.idle[1] > sol.eq.idle[2]);
        CHECK(check_residuals(sol.eq, fleets, cfg).pass);
        for (double r : sol.info.foc_residuals)
            CHECK(std::abs(r) < 1e-8);
        CHECK(sol.info.best_response_converged);
    }
}

TEST_CASE("welfare identity: surplus plus profits") {
    MarketConfig cfg = hk_config(fleets_only({500.0, 400.0, 300.0}));
    auto fleets = cfg.fleets();
    for (const auto& sol :
         {solve_fragmented_nash(fleets, cfg), solve_fragmented_optimum(fleets, cfg)}) {
        CHECK(sol.metrics.welfare ==
              doctest::Approx(sol.metrics.consumer_surplus + sol.metrics.total_profit)
                  .epsilon(1e-9));
        // Utilization = q T / N.
        for (std::size_t i = 0; i < fleets.size(); ++i)
            CHECK(sol.metrics.utilization[i] ==
                  doctest::Approx(sol.eq.q[i] * cfg.T / fleets[i]).epsilon(1e-12));
    }
}

TEST_CASE("symmetric fleets split demand evenly") {
    MarketConfig cfg = hk_config(fleets_only({4000.0, 4000.0, 4000.0, 4000.0}));
    auto fleets = cfg.fleets();
    FragmentedSolution ne = solve_fragmented_nash(fleets, cfg);
    for (std::size_t i = 1; i < fleets.size(); ++i) {
        CHECK(ne.eq.q[i] == doctest::Approx(ne.eq.q[0]).epsilon(1e-10));
        CHECK(ne.eq.fare[i] == doctest::Approx(ne.eq.fare[0]).epsilon(1e-10));
    }
}

TEST_CASE("fixed-fare evaluation reproduces the solved point") {
    MarketConfig cfg = hk_config(fleets_only({500.0, 400.0, 300.0}));
    auto fleets = cfg.fleets();
    FragmentedSolution ne = solve_fragmented_nash(fleets, cfg);
    FragmentedEquilibrium eq = evaluate_given_fares(ne.eq.fare, fleets, cfg);
    CHECK(eq.Q == doctest::Approx(ne.eq.Q).epsilon(1e-8));
    for (std::size_t i = 0; i < fleets.size(); ++i)
        CHECK(eq.q[i] == doctest::Approx(ne.eq.q[i]).epsilon(1e-7));
    CHECK(check_residuals(eq, fleets, cfg).pass);
}

TEST_CASE("overpriced platform is driven out of the market") {
    MarketConfig cfg = hk_config(fleets_only({500.0, 400.0, 300.0}));
    auto fleets = cfg.fleets();
    // Fares that clear a two-platform market, plus an overpriced entrant.
    FragmentedSolution duo = solve_fragmented_nash({500.0, 300.0}, cfg);
    FragmentedEquilibrium eq =
        evaluate_given_fares({duo.eq.fare[0], 10000.0, duo.eq.fare[1]}, fleets, cfg);
    CHECK(eq.q[1] == 0.0);
    CHECK(eq.idle[1] == 400.0);
    CHECK(eq.q[0] > 0.0);
    CHECK(eq.q[2] > 0.0);
    CHECK(check_residuals(eq, fleets, cfg).pass);
}

TEST_CASE("fares below sustainable cost have no normal-regime clearing") {
    MarketConfig cfg = hk_config(fleets_only({500.0, 400.0, 300.0}));
    CHECK_THROWS_AS(evaluate_given_fares({0.0, 0.0, 0.0}, cfg.fleets(), cfg), NoEquilibrium);
}

TEST_CASE("commission headroom closed form") {
    MarketConfig cfg = hk_config(fleets_only({500.0, 400.0, 300.0}));
    // With exponential demand, Q B'(Q) = -1/alpha is constant, so the
    // headroom reduces to the inverse-demand gap and is negative whenever
    // integration raises equilibrium demand.
    double qf = 995.445062793, qi = 1318.78165682;
    double headroom = commission_headroom(qf, qi, 3, cfg.demand);
    CHECK(headroom ==
          doctest::Approx(cfg.demand.inverse_demand(qi) - cfg.demand.inverse_demand(qf))
              .epsilon(1e-12));
    CHECK(headroom < 0.0);

    CHECK_THROWS_AS(commission_headroom(qf, qi, 0, cfg.demand), DomainError);
    CHECK_THROWS_AS(commission_headroom(-1.0, qi, 3, cfg.demand), DomainError);
}

TEST_CASE("argument guards") {
    MarketConfig cfg = hk_config(fleets_only({500.0, 400.0}));
    CHECK_THROWS_AS(solve_fragmented_nash({}, cfg), DimensionError);
    CHECK_THROWS_AS(evaluate_given_fares({70.0}, cfg.fleets(), cfg), DimensionError);
    CHECK_THROWS_AS(evaluate_given_fares({70.0, -5.0}, cfg.fleets(), cfg), ValidationError);
}
