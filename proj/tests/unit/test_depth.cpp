#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rmsim/booking.hpp"
#include "rmsim/depth.hpp"
#include "rmsim/reference_data.hpp"

using namespace rmsim;

namespace {

std::vector<std::vector<double>> rows(const Eigen::MatrixXd& x) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index t = 0; t < x.cols(); ++t) out[static_cast<std::size_t>(i)].push_back(x(i, t));
    return out;
}

Eigen::MatrixXd random_curves(int n, int tau, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd x(n, tau);
    for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (int t = 0; t < tau; ++t) x(i, t) = acc += 3.0 + z(rng);
    }
    return x;
}

Collection regular_collection(int n, std::uint64_t seed) {
    const DemandScenario sc = default_regular_scenario();
    const auto c = emsrb_mr(reference::published_forecast(1.2), sc.fare_structure.fares(), 200);
    return build_collection({n, 0.0, {}}, sc, c, RngSeed{seed});
}

}  // namespace

TEST_CASE("halfspace depth in one dimension") {
    const std::vector<double> s{1, 2, 3, 4, 5};
    CHECK(halfspace_depth_1d(s, 3) == doctest::Approx(0.6));
    CHECK(halfspace_depth_1d(s, 1) == doctest::Approx(0.2));
    CHECK(halfspace_depth_1d(s, 0) == 0.0);
}

TEST_CASE("mfhd matches the brute-force definition") {
    Eigen::MatrixXd steps(5, 4);
    steps << 0, 1, 1, 2, 0, 0, 1, 3, 1, 2, 2, 2, 0, 1, 2, 3, 1, 1, 1, 1;
    for (const Eigen::MatrixXd& x : {steps, random_curves(12, 6, 1), random_curves(40, 9, 2)}) {
        const auto d = mfhd(x, 0.125);
        const auto o = oracle::mfhd(rows(x), 0.125);
        for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(d.depths(i) == doctest::Approx(o[static_cast<std::size_t>(i)]).epsilon(1e-12));
        double w = 0;
        for (double v : d.weights) w += v;
        CHECK(w == doctest::Approx(1.0));
    }
}

TEST_CASE("mfhd symmetry and degenerate horizon") {
    Eigen::MatrixXd x(3, 5);
    x << 0, 1, 2, 3, 4, 1, 2, 3, 4, 5, 2, 3, 4, 5, 6;
    const auto d = mfhd(x, 0.3);
    CHECK(d.depths(1) > d.depths(0));
    CHECK(d.depths(1) > d.depths(2));

    const Eigen::MatrixXd col = random_curves(15, 1, 3);
    const auto one = mfhd(col);
    REQUIRE(one.weights.size() == 1);
    CHECK(one.weights[0] == 1.0);
    std::vector<double> sample(col.data(), col.data() + 15);
    for (Eigen::Index i = 0; i < 15; ++i) CHECK(one.depths(i) == doctest::Approx(halfspace_depth_1d(sample, col(i, 0))));
}

TEST_CASE("mfhd weights are invariant to time rescaling") {
    const Eigen::MatrixXd x = random_curves(30, 7, 4);
    std::vector<double> t{1, 2, 4, 5, 6, 8, 9};
    const auto a = mfhd(x, 0.125, t);
    for (double& v : t) v *= 3.7;
    const auto b = mfhd(x, 0.125, t);
    for (std::size_t j = 0; j < a.weights.size(); ++j) CHECK(b.weights[j] == doctest::Approx(a.weights[j]));
}

TEST_CASE("per-interval depth is rank based") {
    const Eigen::MatrixXd x = random_curves(25, 5, 5);
    Eigen::MatrixXd y = x;
    for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, 2) = std::exp(0.3 * y(i, 2)) + 7.0;
    for (Eigen::Index t = 0; t < x.cols(); ++t) {
        std::vector<double> sx(x.col(t).data(), x.col(t).data() + 25), sy(y.col(t).data(), y.col(t).data() + 25);
        for (Eigen::Index i = 0; i < 25; ++i) CHECK(halfspace_depth_1d(sx, x(i, t)) == halfspace_depth_1d(sy, y(i, t)));
    }
}

TEST_CASE("pointwise median curve has maximal depth at every interval") {
    Eigen::MatrixXd x(5, 3);
    x << 1, 5, 9, 2, 6, 10, 3, 7, 11, 4, 8, 12, 5, 9, 13;
    for (Eigen::Index t = 0; t < 3; ++t) {
        std::vector<double> s(x.col(t).data(), x.col(t).data() + 5);
        for (Eigen::Index i = 0; i < 5; ++i) CHECK(halfspace_depth_1d(s, x(2, t)) >= halfspace_depth_1d(s, x(i, t)));
    }
}

TEST_CASE("all regions empty") {
    const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(6, 4, 3.0);
    CHECK_THROWS_AS(mfhd(same), std::domain_error);
    const auto d = mfhd(same, 0.125, {}, true);
    CHECK(d.time_only_weights);
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(d.depths(i) == doctest::Approx(1.0));
}

TEST_CASE("degenerate bootstrap returns the depth quantile") {
    const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(20, 3, 2.0);
    BootstrapParams q;
    q.replicates = 1;
    q.gamma = 0.0;
    const auto d = mfhd(flat, 0.125, {}, true);
    std::vector<double> v(d.depths.data(), d.depths.data() + 20);
    CHECK(bootstrap_threshold(flat, q, RngSeed{2}) == doctest::Approx(oracle::quantile6(v, 0.01)));
}

TEST_CASE("bootstrap threshold is deterministic and worker independent") {
    const Eigen::MatrixXd x = random_curves(60, 6, 6);
    BootstrapParams p;
    p.replicates = 100;
    const double a = bootstrap_threshold(x, p, RngSeed{9});
    p.workers = 3;
    const double b = bootstrap_threshold(x, p, RngSeed{9});
    CHECK(a == b);
    CHECK(a == bootstrap_threshold(x, p, RngSeed{9}));
}

TEST_CASE("functional detector on degenerate and shifted collections") {
    FunctionalParams p;
    p.bootstrap.replicates = 200;
    const auto flat = functional_detect(Eigen::MatrixXd::Constant(30, 5, 4.0), p, RngSeed{1});
    for (bool f : flat.detection.flags) CHECK_FALSE(f);

    Eigen::MatrixXd x = random_curves(100, 8, 7);
    x.row(42).array() += 40.0;
    const auto r = functional_detect(x, p, RngSeed{2});
    CHECK(r.detection.flags[42]);
    CHECK(r.iteration_flagged[42] == 1);
    CHECK(r.iterations <= 100);
    for (std::size_t i = 0; i < r.detection.flags.size(); ++i) {
        CHECK(r.detection.flags[i] == (r.detection.scores[i] > r.detection.score_threshold));
        CHECK(r.detection.flags[i] == (r.iteration_flagged[i] > 0));
    }

    const auto small = functional_detect(random_curves(5, 3, 8), p, RngSeed{3});
    CHECK(small.detection.abstained);
}

TEST_CASE("threshold calibration on regular collections") {
    const Collection c = regular_collection(500, 31);
    BootstrapParams p;
    p.replicates = 300;
    for (int tau : {10, 30}) {
        const Eigen::MatrixXd x = c.totals(tau);
        const double threshold = bootstrap_threshold(x, p, RngSeed{5});
        const auto d = mfhd(x, p.alpha, {}, true);
        const double below = static_cast<double>((d.depths.array() < threshold).count()) / 500.0;
        CHECK(below <= 0.02);

        FunctionalParams fp;
        fp.bootstrap = p;
        const auto r = functional_detect(x, fp, RngSeed{5});
        long n = 0;
        for (bool f : r.detection.flags) n += f;
        CHECK(static_cast<double>(n) / 500.0 <= 0.03);
    }
}
