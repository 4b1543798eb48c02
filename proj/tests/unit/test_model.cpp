#include <cmath>

#include "doctest.h"
#include "rmsim/errors.hpp"
#include "rmsim/model.hpp"

using namespace rmsim;

TEST_CASE("default scenario moments and no-buy shares") {
    const DemandScenario s = default_regular_scenario();
    CHECK_NOTHROW(s.validate());
    const Moments m = demand_moments(s);
    CHECK(m.mean == doctest::Approx(240.0));
    CHECK(m.sd == doctest::Approx(15.492).epsilon(1e-4));
    REQUIRE(s.segments.size() == 2);
    CHECK(s.segments[0].no_buy == doctest::Approx(0.10));
    CHECK(s.segments[1].no_buy == doctest::Approx(0.05));
    CHECK(late_arrival_ordering(s) == std::optional<bool>(true));
    CHECK(s.fare_structure.fares() == std::vector<double>{400, 300, 280, 240, 200, 185, 175});
    CHECK(s.fare_structure.capacity == 200);
}

TEST_CASE("demand moments of the volume table") {
    DemandScenario s = default_regular_scenario();
    const std::pair<double, double> rows[] = {{240, 1}, {375, 1.25}, {303.75, 1.125}, {183.75, 0.875}, {135, 0.75}};
    const double means[] = {240, 300, 270, 210, 180};
    for (int i = 0; i < 5; ++i) {
        s.gamma_shape = rows[i].first;
        s.gamma_rate = rows[i].second;
        const Moments m = demand_moments(s);
        CHECK(m.mean == doctest::Approx(means[i]));
        CHECK(std::abs(m.sd - 15.492) < 1e-3);
    }
    s.gamma_shape = 1;
    s.gamma_rate = 1;
    CHECK(demand_moments(s).mean == doctest::Approx(1.0));
    CHECK(demand_moments(s).sd == doctest::Approx(1.0));
}

TEST_CASE("scenario validation") {
    DemandScenario s = default_regular_scenario();
    SUBCASE("mix shares must sum to one") {
        s.segments[0].mix_share = 0.6;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("wtp row must sum to one") {
        s.segments[1].no_buy = 0.2;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("ascending fares rejected") {
        s.fare_structure.classes[1].fare = 500;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("regular scenario needs business travellers to peak later") {
        std::swap(s.segments[0].beta_a, s.segments[1].beta_a);
        std::swap(s.segments[0].beta_b, s.segments[1].beta_b);
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
        s.label = Label::outlier(OutlierKind::ArrivalTime, "arrival_2");
        CHECK_NOTHROW(s.validate());
    }
}

TEST_CASE("scenario json round trip") {
    DemandScenario s = default_regular_scenario();
    s.label = Label::outlier(OutlierKind::Volume, "volume+25");
    const auto j = to_json(s);
    const DemandScenario back = scenario_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.label.kind == std::optional<OutlierKind>(OutlierKind::Volume));

    auto broken = j;
    broken.erase("gamma_rate");
    try {
        scenario_from_json(broken);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("gamma_rate") != std::string::npos);
    }
}

TEST_CASE("seed derivation") {
    const RngSeed s{42};
    CHECK(s.derive(3).value == s.derive(3).value);
    CHECK(s.derive(3).value != s.derive(4).value);
    CHECK(s.derive(1, 2).value == s.derive(1).derive(2).value);
    CHECK(s.derive(1, 2).value != s.derive(2, 1).value);
    // Reference value of the splitmix64 finalizer for input 0.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("outlier kind names") {
    for (auto k : {OutlierKind::Volume, OutlierKind::WillingnessToPay, OutlierKind::ArrivalTime})
        CHECK(outlier_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(outlier_kind_from_string("bogus"), std::invalid_argument);
}
