#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rmsim/demand.hpp"

using namespace rmsim;

TEST_CASE("volume outliers keep the standard deviation") {
    const DemandScenario base = default_regular_scenario();
    const DemandScenario up = make_volume_outlier(base, 0.25);
    CHECK(up.gamma_shape == doctest::Approx(375.0));
    CHECK(up.gamma_rate == doctest::Approx(1.25));
    CHECK(up.label.kind == std::optional<OutlierKind>(OutlierKind::Volume));
    const DemandScenario down = make_volume_outlier(base, -0.125);
    CHECK(down.gamma_shape == doctest::Approx(183.75));
    CHECK(down.gamma_rate == doctest::Approx(0.875));

    const DemandScenario same = make_volume_outlier(base, 0.0);
    CHECK(same.gamma_shape == base.gamma_shape);
    CHECK_FALSE(same.label.is_outlier());

    for (double pct : {-0.9, -0.5, -0.1, 0.3, 1.0, 4.0}) {
        const DemandScenario s = make_volume_outlier(base, pct);
        CHECK(std::abs(std::sqrt(s.gamma_shape) / s.gamma_rate - std::sqrt(base.gamma_shape) / base.gamma_rate) < 1e-9);
    }
    CHECK_THROWS_AS(make_volume_outlier(base, -1.0), std::invalid_argument);
}

TEST_CASE("willingness-to-pay outliers") {
    const DemandScenario base = default_regular_scenario();
    const DemandScenario same = make_wtp_outlier(base, {0.5, 0.5});
    CHECK_FALSE(same.label.is_outlier());
    const DemandScenario s = make_wtp_outlier(base, {0.3, 0.7});
    CHECK(240.0 * s.segments[0].mix_share == doctest::Approx(72.0));
    const DemandScenario only_first = make_wtp_outlier(base, {1.0, 0.0});
    for (std::uint64_t k = 0; k < 20; ++k)
        for (const auto& r : sample_requests(only_first, RngSeed{k}).requests) CHECK(r.segment == 0);
    CHECK_THROWS_AS(make_wtp_outlier(base, {0.3, 0.3}), std::invalid_argument);
}

TEST_CASE("arrival-time outliers") {
    const DemandScenario base = default_regular_scenario();
    const auto s1 = make_arrival_outlier(base, 1);
    CHECK(s1.segments[0].beta_a == 5);
    CHECK(s1.segments[0].beta_b == 2);
    CHECK(s1.segments[1].beta_a == 5);
    CHECK(s1.segments[1].beta_b == 2);
    const auto s4 = make_arrival_outlier(base, 4);
    CHECK(s4.segments[0].beta_a == 2);
    CHECK(s4.segments[0].beta_b == 2);
    CHECK(s4.segments[1].beta_a == 2);
    CHECK(s4.segments[1].beta_b == 5);
    auto mode = [](const CustomerSegment& c) { return (c.beta_a - 1) / (c.beta_a + c.beta_b - 2); };
    CHECK(mode(base.segments[0]) == doctest::Approx(0.8));
    CHECK(mode(make_arrival_outlier(base, 2).segments[0]) == doctest::Approx(0.2));
    CHECK_THROWS_AS(make_arrival_outlier(base, 5), std::invalid_argument);
}

TEST_CASE("sample_requests is deterministic per seed") {
    const DemandScenario s = default_regular_scenario();
    const auto a = sample_requests(s, RngSeed{7});
    const auto b = sample_requests(s, RngSeed{7});
    REQUIRE(a.requests.size() == b.requests.size());
    for (std::size_t i = 0; i < a.requests.size(); ++i) {
        CHECK(a.requests[i].time == b.requests[i].time);
        CHECK(a.requests[i].wtp_class == b.requests[i].wtp_class);
    }
    CHECK(std::is_sorted(a.requests.begin(), a.requests.end(),
                         [](const Request& x, const Request& y) { return x.time < y.time; }));
    std::ostringstream os;
    write_requests_csv(os, a);
    CHECK(os.str().rfind("time,segment,wtp_class\n", 0) == 0);
}

TEST_CASE("mean request count matches the gamma mean") {
    const DemandScenario s = default_regular_scenario();
    double total = 0;
    const int n = 10000;
    for (int k = 0; k < n; ++k) total += static_cast<double>(sample_requests(s, RngSeed{1}.derive(k)).requests.size());
    CHECK(std::abs(total / n - 240.0) / 240.0 < 0.01);
}

TEST_CASE("uniform arrivals pass a Kolmogorov-Smirnov test") {
    DemandScenario s = default_regular_scenario();
    s.label = Label::outlier(OutlierKind::ArrivalTime, "uniform");
    s.segments = {s.segments[0]};
    s.segments[0].mix_share = 1.0;
    s.segments[0].beta_a = 1.0;
    s.segments[0].beta_b = 1.0;
    std::vector<double> t;
    for (const auto& r : sample_requests(s, RngSeed{11}).requests) t.push_back(r.time);
    std::sort(t.begin(), t.end());
    const double n = static_cast<double>(t.size());
    double d = 0;
    for (std::size_t i = 0; i < t.size(); ++i) d = std::max({d, (i + 1) / n - t[i], t[i] - i / n});
    CHECK(d < 1.628 / std::sqrt(n));
}

TEST_CASE("leisure travellers arrive earlier") {
    const DemandScenario s = default_regular_scenario();
    long early[2] = {0, 0}, all[2] = {0, 0};
    for (int k = 0; k < 1000; ++k) {
        for (const auto& r : sample_requests(s, RngSeed{3}.derive(k)).requests) {
            all[r.segment] += 1;
            early[r.segment] += r.time < 0.5;
        }
    }
    CHECK(static_cast<double>(early[1]) / all[1] > static_cast<double>(early[0]) / all[0]);
}

TEST_CASE("demand factor scaling and outlier specs") {
    const DemandScenario base = default_regular_scenario();
    for (double fd : {0.9, 1.2, 1.5}) {
        const auto s = scale_to_demand_factor(base, fd);
        CHECK(demand_moments(s).mean == doctest::Approx(fd * 200));
        CHECK(demand_moments(s).sd == doctest::Approx(demand_moments(base).sd));
        CHECK_FALSE(s.label.is_outlier());
    }
    for (const OutlierSpec& o : {OutlierSpec::volume(-0.25), OutlierSpec::wtp({0.2, 0.8}), OutlierSpec::arrival(3)}) {
        const OutlierSpec back = outlier_spec_from_json(to_json(o));
        CHECK(back.kind == o.kind);
        CHECK(back.name() == o.name());
        CHECK(o.apply(base).label.is_outlier());
    }
}
