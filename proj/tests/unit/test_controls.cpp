#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "rmsim/controls.hpp"
#include "rmsim/reference_data.hpp"

using namespace rmsim;

namespace {

const std::vector<double> kFares{400, 300, 280, 240, 200, 185, 175};

void check_nested(const BookingControls& c) {
    REQUIRE(!c.limits.empty());
    CHECK(c.limits[0] == c.capacity);
    for (std::size_t j = 1; j < c.limits.size(); ++j) {
        CHECK(c.limits[j] <= c.limits[j - 1]);
        CHECK(c.limits[j] >= 0);
    }
}

}  // namespace

TEST_CASE("emsrb matches the term-by-term oracle on the published forecasts") {
    for (double fd : reference::kDemandFactors) {
        const ForecastSet f = reference::published_forecast(fd);
        const BookingControls c = emsrb(f.mu, f.var, kFares, 200);
        const auto pl = oracle::emsrb_protection(f.mu, f.var, kFares, 200);
        for (std::size_t j = 0; j < pl.size(); ++j) {
            CHECK(c.raw_protection[j] == doctest::Approx(pl[j]).epsilon(1e-9));
            CHECK(c.limits[j + 1] == 200 - static_cast<int>(std::lround(pl[j])));
        }
        check_nested(c);
    }
}

TEST_CASE("emsrb edge cases") {
    CHECK(emsrb({10}, {4}, {100}, 50).limits == std::vector<int>{50});
    const BookingControls none = emsrb({0, 10}, {0, 4}, {400, 300}, 80);
    CHECK(none.protection[0] == 0);
    CHECK(none.limits[1] == 80);
    CHECK_THROWS_AS(emsrb({1, 2}, {1}, {2, 1}, 5), std::invalid_argument);
    CHECK_THROWS_AS(emsrb({1, 2}, {1, 1}, {1, 2}, 5), std::invalid_argument);
}

TEST_CASE("emsrb protection levels are invariant to fare scale") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1.0, 40.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> mu(5), var(5), fares{500, 0, 0, 0, 0};
        for (int j = 0; j < 5; ++j) {
            mu[j] = u(rng);
            var[j] = u(rng);
            if (j > 0) fares[j] = fares[j - 1] * std::uniform_real_distribution<double>(0.5, 0.99)(rng);
        }
        const auto a = emsrb(mu, var, fares, 150);
        for (double k : {0.01, 3.0, 250.0}) {
            std::vector<double> scaled(fares);
            for (double& r : scaled) r *= k;
            const auto b = emsrb(mu, var, scaled, 150);
            for (std::size_t j = 0; j < a.raw_protection.size(); ++j)
                CHECK(b.raw_protection[j] == doctest::Approx(a.raw_protection[j]).epsilon(1e-9));
        }
        check_nested(a);
    }
}

TEST_CASE("emsrb with zero variance nests deterministically") {
    const std::vector<double> mu{10, 20, 30, 40};
    const std::vector<double> fares{400, 150, 60, 20};  // every ratio r_{j+1} / weighted fare < 0.5
    const auto c = emsrb(mu, {0, 0, 0, 0}, fares, 200);
    CHECK(c.raw_protection[0] == doctest::Approx(10));
    CHECK(c.raw_protection[1] == doctest::Approx(30));
    CHECK(c.raw_protection[2] == doctest::Approx(60));
    const auto tight = emsrb(mu, {0, 0, 0, 0}, fares, 25);
    CHECK(tight.raw_protection[1] == doctest::Approx(25));
}

TEST_CASE("marginal revenue transformation") {
    const auto t = marginal_revenue_transform({10, 20}, {400, 300});
    CHECK(t.adj_mu == std::vector<double>{10, 10});
    CHECK(t.adj_fares[0] == doctest::Approx(400));
    CHECK(t.adj_fares[1] == doctest::Approx(200));
    CHECK_FALSE(t.degenerate[1]);

    const auto via_sellup = marginal_revenue_transform(sellup_cumulative_demand(20, {0.5, 1.0}), {400, 300});
    CHECK(via_sellup.adj_mu == t.adj_mu);
    CHECK(via_sellup.adj_fares[1] == doctest::Approx(t.adj_fares[1]));

    const auto flat = marginal_revenue_transform({10, 10, 15}, {400, 300, 200});
    CHECK(flat.adj_mu[1] == 0.0);
    CHECK(flat.degenerate[1]);
    CHECK_FALSE(flat.degenerate[2]);
    CHECK_THROWS_AS(marginal_revenue_transform({10, 5}, {2, 1}), std::invalid_argument);
}

TEST_CASE("emsrb_mr closes everything below class 1 when all demand buys up") {
    const auto f = ForecastSet::from_moments({50, 50, 50, 50}, {20, 20, 20, 20}, 100, AvailabilityPolicy::LowestOpenClass);
    const auto c = emsrb_mr(f, {400, 300, 200, 100}, 120);
    CHECK(c.limits[0] == 120);
    for (std::size_t j = 1; j < c.limits.size(); ++j) CHECK(c.limits[j] == 0);
}

TEST_CASE("heuristic outputs are nested on random forecasts") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 60.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> mu(7), var(7);
        for (int j = 0; j < 7; ++j) {
            mu[j] = u(rng);
            var[j] = u(rng);
        }
        const auto f = ForecastSet::from_moments(mu, var, 100);
        for (auto h : {Heuristic::EMSRb, Heuristic::EMSRbMR, Heuristic::FCFS}) check_nested(compute_controls(h, f, kFares, 200));
    }
}

TEST_CASE("fcfs leaves every class open") {
    const auto c = fcfs(7, 200);
    CHECK(c.limits == std::vector<int>(7, 200));
    CHECK(heuristic_from_string(to_string(Heuristic::EMSRbMR)) == Heuristic::EMSRbMR);
    CHECK_THROWS_AS(heuristic_from_string("emsra"), std::invalid_argument);
}

TEST_CASE("mid-horizon recomputation") {
    const ForecastSet f = reference::published_forecast(1.2);
    for (auto h : {Heuristic::EMSRb, Heuristic::EMSRbMR}) {
        const auto base = compute_controls(h, f, kFares, 200);
        const auto same = recompute_midhorizon(base, f, kFares, 0, 0.0);
        CHECK(same.limits == base.limits);

        const auto drained = recompute_midhorizon(base, f, kFares, 30, 1.0);
        CHECK(drained.capacity == 170);
        for (std::size_t j = 0; j < drained.limits.size(); ++j) CHECK(drained.limits[j] == 170);

        const auto sold = recompute_midhorizon(base, f, kFares, 20, 0.0);
        for (std::size_t j = 0; j < base.limits.size(); ++j) CHECK(std::abs(sold.limits[j] - (base.limits[j] - 20)) <= 1);
        CHECK_THROWS_AS(recompute_midhorizon(base, f, kFares, 201, 0.0), std::invalid_argument);
    }
}

TEST_CASE("arrived fraction follows the segment Beta CDFs") {
    const DemandScenario s = default_regular_scenario();
    const auto at0 = arrived_fraction_by_class(s, 0.0);
    const auto at1 = arrived_fraction_by_class(s, 1.0);
    const auto mid = arrived_fraction_by_class(s, 0.5);
    for (std::size_t j = 0; j < at0.size(); ++j) {
        CHECK(at0[j] == 0.0);
        CHECK(at1[j] == 1.0);
        CHECK(mid[j] > 0.0);
        CHECK(mid[j] < 1.0);
    }
    // Business-heavy class 1 arrives later than leisure-heavy class 7.
    CHECK(mid[0] < mid[6]);
}

TEST_CASE("controls csv") {
    std::ostringstream os;
    write_controls_csv(os, fcfs(7, 200), default_regular_scenario().fare_structure);
    CHECK(os.str().rfind("class_label,fare,protection_level,booking_limit,heuristic\n", 0) == 0);
}
