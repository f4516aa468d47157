#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rideq/errors.hpp"
#include "rideq/matching.hpp"

#include <cmath>

using namespace rideq;

namespace {
const MatchingModel kModel(5.0, 0.5);
constexpr double kTripTime = 0.4;
} // namespace

TEST_CASE("waiting time power law and derivatives") {
    CHECK(kModel.waiting_time(10000.0) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(kModel.waiting_time(100.0) == doctest::Approx(0.5).epsilon(1e-14));

    for (double x : {25.0, 400.0, 1e4, 3e5}) {
        double h = 1e-4 * x;
        auto d = kModel.waiting_time_derivatives(x);
        double fd1 = (kModel.waiting_time(x + h) - kModel.waiting_time(x - h)) / (2.0 * h);
        double fd2 = (kModel.waiting_time(x + h) - 2.0 * kModel.waiting_time(x) +
                      kModel.waiting_time(x - h)) /
                     (h * h);
        CHECK(d.first == doctest::Approx(fd1).epsilon(1e-7));
        CHECK(d.second == doctest::Approx(fd2).epsilon(1e-6));
        CHECK(d.first < 0.0);
        CHECK(d.second > 0.0);
    }
}

TEST_CASE("conservation curve: inverted U with consistent inverses") {
    ConservationCurve curve(kModel, 20000.0, kTripTime);

    CHECK(curve.peak_demand() > 0.0);
    CHECK(curve.peak_idle() > 0.0);
    CHECK(curve.peak_idle() < 20000.0);
    // The peak is a maximum of demand_at.
    double eps = 1e-3 * curve.peak_idle();
    CHECK(curve.demand_at(curve.peak_idle() + eps) < curve.peak_demand());
    CHECK(curve.demand_at(curve.peak_idle() - eps) < curve.peak_demand());

    for (double frac : {0.05, 0.3, 0.6, 0.9, 0.999}) {
        double q = frac * curve.peak_demand();
        double x = curve.idle_for(q);
        CHECK(x >= curve.peak_idle());
        CHECK(curve.demand_at(x) == doctest::Approx(q).epsilon(1e-8));
        // Conservation identity holds at the returned stock.
        CHECK(20000.0 - x - q * (kTripTime + kModel.waiting_time(x)) ==
              doctest::Approx(0.0).scale(20000.0).epsilon(1e-10));
        if (frac < 0.99) {
            double x_wgc = curve.wgc_idle_for(q);
            CHECK(x_wgc < curve.peak_idle());
            CHECK(curve.demand_at(x_wgc) == doctest::Approx(q).epsilon(1e-7));
        }
    }

    CHECK(curve.idle_for(0.0) == 20000.0);
    CHECK_THROWS_AS(curve.idle_for(curve.peak_demand() * 1.01), InfeasibleDemand);
    CHECK_THROWS_AS(curve.idle_for(-1.0), DomainError);
}

TEST_CASE("idle solutions classify the branches") {
    double peak = max_feasible_demand(kModel, 20000.0, kTripTime);
    IdleSolution normal = solve_idle_platform(kModel, 20000.0, 0.5 * peak, kTripTime);
    CHECK(normal.regime == Regime::Normal);
    CHECK(std::abs(normal.residual) < 1e-6 * 20000.0);

    // Classification flips across the branch fold.
    ConservationCurve curve(kModel, 20000.0, kTripTime);
    double q = 0.5 * peak;
    CHECK(wgc_classify(kModel, q, curve.idle_for(q), 1.0, PoolMode::Platform) ==
          Regime::Normal);
    CHECK(wgc_classify(kModel, q, curve.wgc_idle_for(q), 1.0, PoolMode::Platform) ==
          Regime::WGC);
}

TEST_CASE("pooled idle sensitivity fixture") {
    // N = 20000, Q = 22222.22 on the normal branch: the pooled stock is
    // 10000.0011 vehicles and dX/dQ = -(T + W) / (1 + Q W') = -0.47647.
    IdleSolution sol = solve_idle_pooled(kModel, 20000.0, 22222.22, kTripTime);
    CHECK(sol.idle_vehicles == doctest::Approx(10000.001058823516).epsilon(1e-9));
    IdleSensitivity s = idle_sensitivity(kModel, 22222.22, sol.idle_vehicles, kTripTime, 1.0,
                                         PoolMode::PooledTotal);
    CHECK(s.first == doctest::Approx(-0.476470578178304).epsilon(1e-9));
}

TEST_CASE("idle sensitivity matches differentiating the inversion") {
    for (double fleet : {600.0, 5000.0, 20000.0}) {
        ConservationCurve curve(kModel, fleet, kTripTime);
        for (double frac : {0.2, 0.5, 0.8}) {
            double q = frac * curve.peak_demand();
            double x = curve.idle_for(q);
            double h = 1e-4 * q;
            double fd1 = (curve.idle_for(q + h) - curve.idle_for(q - h)) / (2.0 * h);
            auto s = idle_sensitivity(kModel, q, x, kTripTime, 1.0, PoolMode::Platform);
            CHECK(s.first == doctest::Approx(fd1).epsilon(1e-6));
            CHECK(s.first < 0.0);

            // Second derivative against differences of the analytic first.
            auto first_at = [&](double qq) {
                return idle_sensitivity(kModel, qq, curve.idle_for(qq), kTripTime, 1.0,
                                        PoolMode::Platform)
                    .first;
            };
            double fd2 = (first_at(q + h) - first_at(q - h)) / (2.0 * h);
            CHECK(s.second == doctest::Approx(fd2).epsilon(1e-5));
        }
    }
}

TEST_CASE("idle sensitivity rejects the congested branch") {
    ConservationCurve curve(kModel, 20000.0, kTripTime);
    double q = 0.5 * curve.peak_demand();
    double x_wgc = curve.wgc_idle_for(q);
    CHECK_THROWS_AS(idle_sensitivity(kModel, q, x_wgc, kTripTime, 1.0, PoolMode::Platform),
                    RegimeError);
}

TEST_CASE("branch curve diagnostics") {
    // The pooled curve with the whole fleet coincides with the platform curve.
    for (double x : {100.0, 2000.0, 15000.0}) {
        CHECK(evaluate_branch_curve(kModel, BranchKind::PlatformSupply, x, 20000.0, 20000.0,
                                    kTripTime) ==
              evaluate_branch_curve(kModel, BranchKind::PooledSupply, x, 20000.0, 20000.0,
                                    kTripTime));
    }
    // Share-weighted pooled supply of the whole market equals pooled supply.
    CHECK(evaluate_branch_curve(kModel, BranchKind::PooledShareSupply, 3000.0, 12000.0,
                                12000.0, kTripTime) ==
          doctest::Approx(evaluate_branch_curve(kModel, BranchKind::PooledSupply, 3000.0,
                                                12000.0, 12000.0, kTripTime)));
    CHECK_THROWS_AS(
        evaluate_branch_curve(kModel, BranchKind::IdleRatio, 1.5, 500.0, 500.0, kTripTime),
        DomainError);
    CHECK_THROWS_AS(evaluate_branch_curve(kModel, BranchKind::PlatformSupply, -1.0, 500.0,
                                          500.0, kTripTime),
                    DomainError);
}

TEST_CASE("model parameter guards") {
    CHECK_THROWS_AS(MatchingModel(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(MatchingModel(5.0, 1.5), DomainError);
    CHECK_THROWS_AS(kModel.waiting_time(0.0), DomainError);
    CHECK_THROWS_AS(ConservationCurve(kModel, -10.0, kTripTime), DomainError);
}
