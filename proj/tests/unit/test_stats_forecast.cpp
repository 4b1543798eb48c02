#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "rmsim/forecast.hpp"
#include "rmsim/stats.hpp"

using namespace rmsim;

TEST_CASE("quantile with (n+1)p weighting") {
    std::vector<double> x(100);
    std::iota(x.begin(), x.end(), 1.0);
    CHECK(stats::quantile(x, 0.025) == doctest::Approx(2.525));
    CHECK(stats::quantile(x, 0.975) == doctest::Approx(98.475));
    CHECK(stats::quantile(x, 0.0) == 1.0);
    CHECK(stats::quantile(x, 1.0) == 100.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> y(3 + trial);
        for (double& v : y) v = n(rng);
        for (double p : {0.01, 0.2, 0.5, 0.77, 0.99}) CHECK(stats::quantile(y, p) == doctest::Approx(oracle::quantile6(y, p)));
    }
}

TEST_CASE("median, mad, variance") {
    CHECK(stats::median({1, 2, 3, 4, 100}) == 3);
    const std::vector<double> x{1, 2, 3, 4, 100};
    CHECK(stats::mad(x) == 1);
    const std::vector<double> y{2, 4, 4, 4, 5, 5, 7, 9};
    CHECK(stats::mean(y) == 5);
    CHECK(stats::variance(y) == doctest::Approx(32.0 / 7.0));
}

TEST_CASE("distribution functions agree with the oracles") {
    for (double p : {0.001, 0.025, 0.3, 0.5, 0.9, 0.999}) CHECK(stats::normal_quantile(p) == doctest::Approx(oracle::norm_ppf(p)).epsilon(1e-9));
    for (int n : {1, 10, 100}) {
        for (int k = 0; k <= n; k += std::max(1, n / 7)) {
            CHECK(stats::binomial_cdf(k, n, 0.95) == doctest::Approx(oracle::binom_cdf(k, n, 0.95)).epsilon(1e-9));
            CHECK(stats::binomial_cdf(k, n, 0.3) == doctest::Approx(oracle::binom_cdf(k, n, 0.3)).epsilon(1e-9));
        }
    }
}

TEST_CASE("nobody buys") {
    DemandScenario s = default_regular_scenario();
    for (auto& seg : s.segments) {
        seg.wtp.assign(7, 0.0);
        seg.no_buy = 1.0;
    }
    const auto f = forecast_demand(s, 20, RngSeed{1});
    for (std::size_t j = 0; j < 7; ++j) {
        CHECK(f.mu[j] == 0.0);
        CHECK(f.var[j] == 0.0);
    }
}

TEST_CASE("standard errors") {
    const auto f = ForecastSet::from_moments({10}, {25}, 100);
    CHECK(f.se_mu[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(ForecastSet::from_moments({1}, {1}, 1), std::invalid_argument);
}

TEST_CASE("forecast is reproducible, worker independent and below total demand") {
    const DemandScenario s = default_regular_scenario();
    const auto a = forecast_demand(s, 100, RngSeed{5}, AvailabilityPolicy::IndependentClassDemand, 1);
    const auto b = forecast_demand(s, 100, RngSeed{5}, AvailabilityPolicy::IndependentClassDemand, 3);
    CHECK(a.mu == b.mu);
    CHECK(a.var == b.var);
    const double total = std::accumulate(a.mu.begin(), a.mu.end(), 0.0);
    CHECK(total < 240.0 + 3 * 15.5);
    // Expected share of buyers is 0.925.
    CHECK(total == doctest::Approx(222.0).epsilon(0.05));

    const auto cum = forecast_demand(s, 100, RngSeed{5}, AvailabilityPolicy::LowestOpenClass);
    CHECK(cum.mu.back() == doctest::Approx(total));
    for (std::size_t j = 1; j < 7; ++j) CHECK(cum.mu[j] >= cum.mu[j - 1]);

    std::ostringstream os;
    write_forecast_csv(os, a, s.fare_structure);
    CHECK(os.str().rfind("class_label,fare,mu,var,se_mu,se_var\n", 0) == 0);
}
