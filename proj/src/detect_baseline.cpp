#include "rmsim/detect_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "rmsim/stats.hpp"

namespace rmsim {

IntervalDetection IntervalDetection::abstain(std::size_t n, std::string why) {
    IntervalDetection d;
    d.flags.assign(n, false);
    d.scores.assign(n, 0.0);
    d.abstained = true;
    d.note = std::move(why);
    return d;
}

namespace {

std::vector<double> last_column(const Eigen::MatrixXd& prefix) {
    if (prefix.cols() < 1) throw std::invalid_argument("prefix has no intervals");
    std::vector<double> y(static_cast<std::size_t>(prefix.rows()));
    for (Eigen::Index n = 0; n < prefix.rows(); ++n) y[static_cast<std::size_t>(n)] = prefix(n, prefix.cols() - 1);
    return y;
}

// Flags values outside [lo, hi]; score is the distance outside the band.
IntervalDetection band(const std::vector<double>& y, double lo, double hi) {
    IntervalDetection d;
    d.threshold_lo = lo;
    d.threshold_hi = hi;
    d.score_threshold = 0.0;
    d.flags.resize(y.size());
    d.scores.resize(y.size());
    for (std::size_t n = 0; n < y.size(); ++n) {
        const double s = std::max(lo - y[n], y[n] - hi);
        d.scores[n] = s;
        d.flags[n] = s > 0.0;
    }
    return d;
}

IntervalDetection above(std::vector<double> scores, double threshold) {
    IntervalDetection d;
    d.score_threshold = threshold;
    d.flags.resize(scores.size());
    for (std::size_t n = 0; n < scores.size(); ++n) d.flags[n] = scores[n] > threshold;
    d.scores = std::move(scores);
    return d;
}

}  // namespace

IntervalDetection PercentileDetector::detect(const Eigen::MatrixXd& prefix) const {
    if (prefix.rows() < 2) throw std::invalid_argument("percentile detector needs N >= 2");
    const auto y = last_column(prefix);
    std::vector<double> sorted(y);
    std::sort(sorted.begin(), sorted.end());
    return band(y, stats::quantile_sorted(sorted, lower_), stats::quantile_sorted(sorted, upper_));
}

std::optional<WilksInterval> wilks_interval(int n, double coverage, double confidence) {
    if (n < 1) return std::nullopt;
    for (int k = 1; k <= n; ++k) {
        if (stats::binomial_cdf(k - 1, n, coverage) >= confidence) {
            WilksInterval w;
            w.k = k;
            w.r = (n - k + 1) / 2;
            w.s = k + w.r;
            if (w.r < 1 || w.s > n) return std::nullopt;
            return w;
        }
    }
    return std::nullopt;
}

IntervalDetection ToleranceDetector::detect(const Eigen::MatrixXd& prefix) const {
    const auto y = last_column(prefix);
    const auto w = wilks_interval(static_cast<int>(y.size()), coverage_, confidence_);
    if (!w) return IntervalDetection::abstain(y.size(), "sample too small for the requested tolerance interval");
    std::vector<double> sorted(y);
    std::sort(sorted.begin(), sorted.end());
    return band(y, sorted[static_cast<std::size_t>(w->r - 1)], sorted[static_cast<std::size_t>(w->s - 1)]);
}

PoissonBounds poisson_tolerance_bounds(long y, double n, double coverage, double alpha) {
    if (y < 0) throw std::invalid_argument("count must be non-negative");
    if (!(n > 0.0)) throw std::invalid_argument("exposure must be positive");
    namespace bm = boost::math;
    PoissonBounds b;
    b.lambda_lo = y == 0 ? 0.0 : bm::quantile(bm::chi_squared(2.0 * y), alpha / 2.0) / (2.0 * n);
    b.lambda_hi = bm::quantile(bm::chi_squared(2.0 * y + 2.0), 1.0 - alpha / 2.0) / (2.0 * n);
    const double q = (1.0 + coverage) / 2.0;

    // Largest L with P(Y > L | lambda_lo) >= q; L = -1 always qualifies.
    b.lower = -1;
    if (b.lambda_lo > 0.0) {
        const bm::poisson_distribution<double> lo(b.lambda_lo);
        while (1.0 - bm::cdf(lo, static_cast<double>(b.lower + 1)) >= q) ++b.lower;
    }
    // Smallest U with P(Y < U | lambda_hi) >= q.
    const bm::poisson_distribution<double> hi(b.lambda_hi);
    long u = 0;
    while (u < 1 || bm::cdf(hi, static_cast<double>(u - 1)) < q) ++u;
    b.upper = u;
    return b;
}

IntervalDetection PoissonToleranceDetector::detect(const Eigen::MatrixXd& prefix) const {
    const auto y = last_column(prefix);
    const double med = stats::median(y);
    const long ref = std::lround(std::max(0.0, med));
    const PoissonBounds b = poisson_tolerance_bounds(ref, 1.0, coverage_, alpha_);
    const double lo = b.lower < 0 ? -std::numeric_limits<double>::infinity() : static_cast<double>(b.lower);
    return band(y, lo, static_cast<double>(b.upper));
}

IntervalDetection RobustZDetector::detect(const Eigen::MatrixXd& prefix) const {
    const auto y = last_column(prefix);
    const double med = stats::median(y);
    const double mad = stats::mad(y);
    std::vector<double> scores(y.size());
    if (mad > 0.0) {
        for (std::size_t n = 0; n < y.size(); ++n) scores[n] = std::abs(0.6745 * (y[n] - med) / mad);
        return above(std::move(scores), cutoff_);
    }
    for (std::size_t n = 0; n < y.size(); ++n) scores[n] = std::abs(y[n] - med);
    IntervalDetection d = above(std::move(scores), 0.0);
    d.note = "MAD is zero; flagging every value off the median";
    return d;
}

std::string to_string(Metric m) { return m == Metric::Euclidean ? "euclidean" : "manhattan"; }

double distance(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b, Metric m) {
    if (m == Metric::Euclidean) return (a - b).norm();
    return (a - b).cwiseAbs().sum();
}

IntervalDetection DistanceDetector::detect(const Eigen::MatrixXd& prefix) const {
    const Eigen::Index N = prefix.rows();
    if (N < 3) throw std::invalid_argument("distance detector needs N >= 3");
    std::vector<double> mean_dist(static_cast<std::size_t>(N), 0.0);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = i + 1; j < N; ++j) {
            const double d = distance(prefix.row(i), prefix.row(j), metric_);
            mean_dist[static_cast<std::size_t>(i)] += d;
            mean_dist[static_cast<std::size_t>(j)] += d;
        }
    }
    for (double& d : mean_dist) d /= static_cast<double>(N - 1);
    const double mu = stats::mean(mean_dist);
    const double sd = std::sqrt(stats::variance(mean_dist));
    return above(std::move(mean_dist), mu + 3.0 * sd);
}

namespace {

double wcss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centres, const std::vector<int>& assignment) {
    double s = 0.0;
    for (Eigen::Index n = 0; n < x.rows(); ++n)
        s += (x.row(n) - centres.row(assignment[static_cast<std::size_t>(n)])).squaredNorm();
    return s;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& x, int k, Metric metric, RngSeed seed, KMeansInit init, int max_iter) {
    const Eigen::Index N = x.rows();
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (N < k) throw std::invalid_argument("need at least k patterns");
    std::mt19937_64 rng(seed.value);
    KMeansResult res;
    res.assignment.assign(static_cast<std::size_t>(N), 0);
    res.centres = Eigen::MatrixXd::Zero(k, x.cols());

    auto recompute_centres = [&] {
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index n = 0; n < N; ++n) {
            const int c = res.assignment[static_cast<std::size_t>(n)];
            sums.row(c) += x.row(n);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                res.centres.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                continue;
            }
            Eigen::Index far = 0;
            double best = -1.0;
            for (Eigen::Index n = 0; n < N; ++n) {
                const double d = distance(x.row(n), res.centres.row(res.assignment[static_cast<std::size_t>(n)]), metric);
                if (d > best) {
                    best = d;
                    far = n;
                }
            }
            res.centres.row(c) = x.row(far);
        }
    };

    if (init == KMeansInit::FarthestFirst) {
        std::uniform_int_distribution<Eigen::Index> pick(0, N - 1);
        res.centres.row(0) = x.row(pick(rng));
        std::vector<double> nearest(static_cast<std::size_t>(N), std::numeric_limits<double>::infinity());
        for (int c = 1; c < k; ++c) {
            Eigen::Index far = 0;
            double best = -1.0;
            for (Eigen::Index n = 0; n < N; ++n) {
                auto& d = nearest[static_cast<std::size_t>(n)];
                d = std::min(d, distance(x.row(n), res.centres.row(c - 1), metric));
                if (d > best) {
                    best = d;
                    far = n;
                }
            }
            res.centres.row(c) = x.row(far);
        }
    } else {
        std::uniform_int_distribution<int> pick(0, k - 1);
        for (auto& a : res.assignment) a = pick(rng);
        recompute_centres();
    }

    bool first = true;
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (Eigen::Index n = 0; n < N; ++n) {
            int best_c = 0;
            double best = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = distance(x.row(n), res.centres.row(c), metric);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            auto& a = res.assignment[static_cast<std::size_t>(n)];
            if (a != best_c) {
                a = best_c;
                changed = true;
            }
        }
        if (!changed && !first) break;
        first = false;
        recompute_centres();
        res.objective.push_back(wcss(x, res.centres, res.assignment));
        res.iterations = it + 1;
        if (!changed) break;
    }
    return res;
}

IntervalDetection KMeansDetector::detect(const Eigen::MatrixXd& prefix) const {
    const KMeansResult km = kmeans(prefix, k_, metric_, seed_, init_);
    std::vector<double> d(static_cast<std::size_t>(prefix.rows()));
    for (Eigen::Index n = 0; n < prefix.rows(); ++n)
        d[static_cast<std::size_t>(n)] = distance(prefix.row(n), km.centres.row(km.assignment[static_cast<std::size_t>(n)]), metric_);
    const auto [mn, mx] = std::minmax_element(d.begin(), d.end());
    const double threshold = 0.5 * (*mn + *mx);
    return above(std::move(d), threshold);
}

}  // namespace rmsim
