#include <cmath>
#include <random>

#include "doctest.h"
#include "rmsim/booking.hpp"
#include "rmsim/extrapolate.hpp"
#include "rmsim/reference_data.hpp"
#include "rmsim/stats.hpp"

using namespace rmsim;

namespace {

Collection collection(const CollectionConfig& cfg, std::uint64_t seed) {
    const DemandScenario sc = default_regular_scenario();
    const auto c = emsrb_mr(reference::published_forecast(1.2), sc.fare_structure.fares(), 200);
    return build_collection(cfg, sc, c, RngSeed{seed});
}

std::vector<double> row(const Eigen::MatrixXd& m, Eigen::Index i) {
    std::vector<double> v;
    for (Eigen::Index t = 0; t < m.cols(); ++t) v.push_back(m(i, t));
    return v;
}

}  // namespace

TEST_CASE("simple exponential smoothing") {
    const std::vector<double> twos(6, 2.0);
    for (double a : {0.1, 0.5, 0.9}) CHECK(fit_ses(twos, a).level == doctest::Approx(2.0));
    const std::vector<double> x{1, 5, 2, 7};
    CHECK(fit_ses(x, 1.0).level == 7.0);
    CHECK(fit_ses(std::vector<double>{1, 3}, 0.5).level == doctest::Approx(2.0));

    // The optimized constant is no worse than any grid value.
    const std::vector<double> y{3, 4, 2, 6, 5, 7, 6, 9};
    auto sse = [&](double a) {
        double level = y[0], s = 0;
        for (std::size_t t = 1; t < y.size(); ++t) {
            s += (y[t] - level) * (y[t] - level);
            level = a * y[t] + (1 - a) * level;
        }
        return s;
    };
    const double best = sse(fit_ses(y).alpha);
    for (int i = 0; i <= 100; ++i) CHECK(best <= sse(i / 100.0) + 1e-9);

    const auto c = ses_extrapolate(std::vector<double>{2, 4, 6, 8}, 8, 0.3);
    CHECK(c.extrapolated_suffix == std::vector<double>{10, 12, 14, 16});
}

TEST_CASE("differencing order selection") {
    std::vector<double> line;
    for (int t = 0; t < 20; ++t) line.push_back(3.0 * t);
    CHECK(select_differencing(line) == 1);
    std::vector<double> quad;
    for (int t = 0; t < 20; ++t) quad.push_back(0.5 * t * t);
    CHECK(select_differencing(quad) == 2);
    CHECK(difference(std::vector<double>{1, 4, 9, 16}, 2) == std::vector<double>{2, 2});
}

TEST_CASE("white noise gives the sample mean") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(5.0, 1.0);
    std::vector<double> x(200);
    for (double& v : x) v = z(rng);
    CHECK(select_differencing(x) == 0);
    const auto fit = fit_arma(x, 0, 0, true);
    CHECK(fit.mu == doctest::Approx(stats::mean(x)).epsilon(1e-4));
    for (double v : fit.forecast(x, 5)) CHECK(v == doctest::Approx(fit.mu));
}

TEST_CASE("exact linear trend is continued") {
    std::vector<double> prefix;
    for (int t = 1; t <= 10; ++t) prefix.push_back(4.0 * t);
    const auto c = arima_extrapolate(prefix, 15);
    REQUIRE(c.extrapolated_suffix.size() == 5);
    for (int s = 0; s < 5; ++s) CHECK(c.extrapolated_suffix[static_cast<std::size_t>(s)] == doctest::Approx(4.0 * (11 + s)).epsilon(1e-6));
    CHECK_FALSE(c.fallback);
}

TEST_CASE("AR(1) simulate and refit") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 1.0);
    const double phi = 0.8, mu = 10.0;
    std::vector<double> x{mu};
    for (int t = 1; t < 200; ++t) x.push_back(mu + phi * (x.back() - mu) + z(rng));
    const auto fit = fit_arma(x, 1, 0, true);
    CHECK(std::abs(fit.phi[0] - phi) < 0.1);
    CHECK(fit.admissible);
    const double one_step = fit.forecast(x, 1)[0];
    CHECK(one_step == doctest::Approx(fit.phi[0] * x.back() + (1 - fit.phi[0]) * fit.mu).epsilon(1e-9));
    CHECK(std::abs(one_step - (phi * x.back() + (1 - phi) * mu)) < 0.5);
}

TEST_CASE("unit-circle check") {
    CHECK(roots_outside_unit_circle({0.5}, -1));
    CHECK_FALSE(roots_outside_unit_circle({1.2}, -1));
    CHECK(roots_outside_unit_circle({0.5, 0.3}, -1));
    CHECK_FALSE(roots_outside_unit_circle({0.5, 0.6}, -1));
    CHECK(roots_outside_unit_circle({}, +1));
}

TEST_CASE("IGARCH simulate and refit") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> noise(500);
    for (double& v : noise) v = 2.0 + z(rng);
    const auto flat = fit_igarch(noise);
    REQUIRE(flat);
    CHECK(flat->alpha < 0.15);
    CHECK(flat->mu == doctest::Approx(stats::mean(noise)).epsilon(0.05));

    const double alpha = 0.3, omega = 0.1;
    std::vector<double> x;
    double s2 = 1.0;
    for (int t = 0; t < 500; ++t) {
        const double e = std::sqrt(s2) * z(rng);
        x.push_back(1.0 + e);
        s2 = omega + alpha * e * e + (1 - alpha) * s2;
    }
    const auto fit = fit_igarch(x);
    REQUIRE(fit);
    CHECK(std::abs(fit->alpha - alpha) < 0.15);

    CHECK_FALSE(fit_igarch(std::vector<double>(20, 3.0)).has_value());
    std::vector<double> constant_prefix;
    for (int t = 1; t <= 12; ++t) constant_prefix.push_back(5.0 * t);
    CHECK(igarch_extrapolate(constant_prefix, 20).fallback);
}

TEST_CASE("completion invariants") {
    const auto col = collection({40, 0.0, {}}, 5);
    for (auto m : {ExtrapolationMethod::SES, ExtrapolationMethod::ARIMA, ExtrapolationMethod::IGARCH}) {
        for (int tau : {3, 10, 20, 30}) {
            const Eigen::MatrixXd prefix = col.totals(tau);
            const auto done = complete_collection(prefix, 30, m, 200.0);
            for (Eigen::Index i = 0; i < prefix.rows(); ++i) {
                const auto& c = done[static_cast<std::size_t>(i)];
                REQUIRE(c.full().size() == 30);
                if (tau == 30) CHECK(c.extrapolated_suffix.empty());
                double prev = c.observed_prefix.back();
                for (double v : c.extrapolated_suffix) {
                    CHECK(v >= prev);
                    CHECK(v <= 200.0);
                    prev = v;
                }
            }
            // Completing one row alone gives the same answer.
            const auto alone = extrapolate(m, row(prefix, 7), 30, 200.0);
            CHECK(alone.extrapolated_suffix == done[7].extrapolated_suffix);
        }
    }

    Eigen::MatrixXd same(4, 8);
    for (int i = 0; i < 4; ++i)
        for (int t = 0; t < 8; ++t) same(i, t) = 3.0 * (t + 1) + (t % 3);
    const auto done = complete_collection(same, 20, ExtrapolationMethod::ARIMA, 1e9, 2);
    for (int i = 1; i < 4; ++i) CHECK(done[static_cast<std::size_t>(i)].extrapolated_suffix == done[0].extrapolated_suffix);
    CHECK(extrapolate(ExtrapolationMethod::IGARCH, std::vector<double>{1, 2, 3}, 10).fallback);
}

TEST_CASE("upward volume outliers complete above regular patterns") {
    const auto col = collection({400, 0.1, {OutlierSpec::volume(0.25)}}, 6);
    const auto done = complete_collection(col.totals(10), 30, ExtrapolationMethod::ARIMA, 200.0);
    const auto truth = col.truth();
    double reg = 0, out = 0;
    int nr = 0, no = 0;
    for (std::size_t i = 0; i < done.size(); ++i) {
        const double v = done[i].extrapolated_suffix.back();
        if (truth[i]) {
            out += v;
            ++no;
        } else {
            reg += v;
            ++nr;
        }
    }
    REQUIRE(no > 0);
    CHECK(out / no > reg / nr);
}

TEST_CASE("completion error shrinks as more of the horizon is observed") {
    const auto col = collection({60, 0.0, {}}, 7);
    const Eigen::MatrixXd actual = col.totals(30);
    for (auto m : {ExtrapolationMethod::SES, ExtrapolationMethod::ARIMA, ExtrapolationMethod::IGARCH}) {
        auto rmse = [&](int tau) {
            const Eigen::MatrixXd done = to_matrix(complete_collection(col.totals(tau), 30, m, 200.0));
            const Eigen::MatrixXd err = done.rightCols(30 - tau) - actual.rightCols(30 - tau);
            return std::sqrt(err.squaredNorm() / static_cast<double>(err.size()));
        };
        CHECK_MESSAGE(rmse(12) > rmse(25), to_string(m));
    }
}

TEST_CASE("method names") {
    for (auto m : {ExtrapolationMethod::SES, ExtrapolationMethod::ARIMA, ExtrapolationMethod::IGARCH})
        CHECK(extrapolation_method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(extrapolation_method_from_string("prophet"), std::invalid_argument);
}
