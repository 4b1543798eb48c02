#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rmsim/empirical.hpp"
#include "rmsim/errors.hpp"

using namespace rmsim;

namespace {

const char* kHeader = "pattern_id,interval_index,cumulative_bookings,day_of_week,shortened_horizon\n";

std::vector<EmpiricalPattern> random_patterns(int n, int T, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_int_distribution<int> day(0, 6);
    std::vector<EmpiricalPattern> out;
    for (int i = 0; i < n; ++i) {
        EmpiricalPattern p{"P" + std::to_string(i), day(rng), i % 9 == 0, {}};
        double c = 0;
        for (int t = 0; t < T; ++t) p.values.push_back(c += 5 + z(rng));
        out.push_back(p);
    }
    return out;
}

}  // namespace

TEST_CASE("ingest well-formed input") {
    std::istringstream in(std::string(kHeader) +
                          "a,1,1,0,0\na,2,3,0,0\nb,1,0,2,1\nb,2,4,2,1\nc,2,9,5,0\nc,1,2,5,0\n");
    const auto r = ingest(in);
    REQUIRE(r.patterns.size() == 3);
    CHECK(r.rejected.empty());
    CHECK(r.patterns[2].values == std::vector<double>{2, 9});
    CHECK(r.patterns[1].shortened_horizon);
    CHECK(r.patterns[1].day_of_week == 2);

    std::ostringstream os;
    write_empirical_csv(os, r.patterns);
    std::istringstream back(os.str());
    CHECK(ingest(back).patterns.size() == 3);
}

TEST_CASE("ingest rejects a dip and reports it") {
    std::istringstream in(std::string(kHeader) + "a,1,1,0,0\na,2,3,0,0\nb,1,5,1,0\nb,2,4,1,0\n");
    const auto r = ingest(in);
    CHECK(r.patterns.size() == 1);
    REQUIRE(r.rejected.size() == 1);
    CHECK(r.rejected[0].pattern_id == "b");
    CHECK(r.rejected[0].rows == std::vector<long>{4});
}

TEST_CASE("ingest errors") {
    auto fails_with = [](const std::string& body, const std::string& needle) {
        std::istringstream in(body);
        try {
            ingest(in);
            return false;
        } catch (const DataError& e) {
            return std::string(e.what()).find(needle) != std::string::npos;
        }
    };
    CHECK(fails_with(std::string(kHeader) + "a,1,1,0,0\na,1,2,0,0\n", "pattern_id=a, interval_index=1"));
    CHECK(fails_with("id,t,y\n", "schema"));
    CHECK(fails_with(std::string(kHeader) + "a,1,1,0,0\na,2,2,0,0\nb,1,1,0,0\n", "ragged"));
    CHECK(fails_with(std::string(kHeader) + "a,1,1,0,0\na,3,2,0,0\n", "gaps"));
    CHECK(fails_with(std::string(kHeader) + "a,1,1,0,0\na,2,2,1,0\n", "covariates"));
    CHECK(fails_with(std::string(kHeader) + "a,1,x,0,0\n", "non-numeric"));
}

TEST_CASE("intercept-only regression") {
    auto ps = random_patterns(20, 6, 1);
    for (auto& p : ps) {
        p.day_of_week = 0;
        p.shortened_horizon = false;
    }
    const auto r = pointwise_regression(ps);
    for (Eigen::Index t = 0; t < 6; ++t) {
        double m = 0;
        for (const auto& p : ps) m += p.values[static_cast<std::size_t>(t)];
        m /= 20;
        CHECK(r.coefficients(0, t) == doctest::Approx(m));
        for (Eigen::Index i = 0; i < 20; ++i) CHECK(r.residuals(i, t) == doctest::Approx(ps[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(t)] - m));
    }
    CHECK_FALSE(r.term_present[1]);
    CHECK(r.coefficients.row(3).isZero());
}

TEST_CASE("group offsets are recovered") {
    auto ps = random_patterns(40, 5, 2);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        ps[i].shortened_horizon = false;
        ps[i].day_of_week = i % 2 ? 3 : 0;
        if (i % 2) continue;
        ps[i].values = ps[i + 1].values;
        for (double& v : ps[i + 1].values) v += 12.5;
    }
    const auto r = pointwise_regression(ps);
    for (Eigen::Index t = 0; t < 5; ++t) CHECK(r.coefficients(3, t) == doctest::Approx(12.5));
}

TEST_CASE("residual columns have zero mean and ignore covariate functions") {
    const auto ps = random_patterns(200, 8, 3);
    const auto r = pointwise_regression(ps);
    for (Eigen::Index t = 0; t < 8; ++t) CHECK(std::abs(r.residuals.col(t).mean()) < 1e-9);

    auto shifted = ps;
    for (auto& p : shifted)
        for (std::size_t t = 0; t < p.values.size(); ++t) p.values[t] += 3.0 * p.day_of_week * std::sin(t + 1.0) + (p.shortened_horizon ? 7.0 * t : 0.0);
    const auto r2 = pointwise_regression(shifted);
    CHECK((r.residuals - r2.residuals).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("collinear indicators are named") {
    auto ps = random_patterns(10, 4, 4);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        ps[i].day_of_week = i < 5 ? 0 : 6;
        ps[i].shortened_horizon = i >= 5;
    }
    try {
        pointwise_regression(ps);
        FAIL("expected a collinearity error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("shortened_horizon") != std::string::npos);
    }
}

TEST_CASE("empirical detection") {
    FunctionalParams p;
    p.bootstrap.replicates = 200;

    std::vector<EmpiricalPattern> flat;
    for (int i = 0; i < 30; ++i) flat.push_back({"F" + std::to_string(i), i % 7, false, std::vector<double>(5, 10.0 + i % 7)});
    const auto none = detect_empirical(flat, p, RngSeed{1});
    CHECK(none.flagged_ids.empty());

    auto ps = random_patterns(80, 6, 5);
    const auto base = pointwise_regression(ps);
    for (Eigen::Index t = 0; t < 6; ++t) {
        const double sd = std::sqrt(base.residuals.col(t).squaredNorm() / (80.0 - 1.0));
        ps[17].values[static_cast<std::size_t>(t)] += 5.0 * sd;
    }
    const auto rep = detect_empirical(ps, p, RngSeed{2});
    CHECK(std::find(rep.flagged_ids.begin(), rep.flagged_ids.end(), "P17") != rep.flagged_ids.end());

    const auto a = detect_empirical(ps, p, RngSeed{3});
    const auto b = detect_empirical(ps, p, RngSeed{3});
    CHECK(a.flagged_ids == b.flagged_ids);
    CHECK(a.detection.threshold == b.detection.threshold);
}

TEST_CASE("synthetic railway fixture") {
    const Fixture fx = make_fixture({}, RngSeed{2024});
    CHECK(fx.patterns.size() == 1387);
    CHECK(fx.patterns.front().values.size() == 18);
    for (const auto& p : fx.patterns)
        for (std::size_t t = 1; t < p.values.size(); ++t) CHECK(p.values[t] >= p.values[t - 1]);
    const double share = static_cast<double>(fx.outlier_ids.size()) / 1387.0;
    CHECK(share > 0.03);
    CHECK(share < 0.07);
}
