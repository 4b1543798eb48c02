#include "rmsim/depth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rmsim/parallel.hpp"
#include "rmsim/stats.hpp"

namespace rmsim {

double halfspace_depth_1d(std::span<const double> sample, double x) {
    if (sample.empty()) throw std::invalid_argument("depth of an empty sample");
    std::size_t below = 0, above = 0;
    for (double y : sample) {
        below += y <= x ? 1 : 0;
        above += y >= x ? 1 : 0;
    }
    return static_cast<double>(std::min(below, above)) / static_cast<double>(sample.size());
}

DepthResult mfhd(const Eigen::MatrixXd& x, double alpha, std::span<const double> times, bool time_only_fallback) {
    const Eigen::Index N = x.rows();
    const Eigen::Index tau = x.cols();
    if (N < 1 || tau < 1) throw std::invalid_argument("depth needs a non-empty sample");
    if (!(alpha > 0.0) || alpha > 0.5) throw std::invalid_argument("alpha must lie in (0, 0.5]");
    if (!times.empty() && static_cast<Eigen::Index>(times.size()) != tau)
        throw std::invalid_argument("times length differs from number of intervals");

    std::vector<double> t(static_cast<std::size_t>(tau));
    for (Eigen::Index j = 0; j < tau; ++j) t[static_cast<std::size_t>(j)] = times.empty() ? static_cast<double>(j + 1) : times[static_cast<std::size_t>(j)];
    std::vector<double> dt(static_cast<std::size_t>(tau), 1.0);
    if (tau > 1) {
        for (std::size_t j = 0; j + 1 < t.size(); ++j) dt[j] = t[j + 1] - t[j];
        dt.back() = 0.5 * (t[t.size() - 1] - t[t.size() - 2]);
    }

    const auto n = static_cast<std::size_t>(N);
    const auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(N) * alpha - 1e-12));
    DepthResult res;
    res.alpha = alpha;
    res.depths = Eigen::VectorXd::Zero(N);
    Eigen::MatrixXd hd(N, tau);
    std::vector<double> region(static_cast<std::size_t>(tau), 0.0);
    std::vector<double> col(n);
    for (Eigen::Index j = 0; j < tau; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = x(static_cast<Eigen::Index>(i), j);
        std::sort(col.begin(), col.end());
        for (std::size_t i = 0; i < n; ++i) {
            const double v = x(static_cast<Eigen::Index>(i), j);
            const auto le = static_cast<std::size_t>(std::upper_bound(col.begin(), col.end(), v) - col.begin());
            const auto ge = n - static_cast<std::size_t>(std::lower_bound(col.begin(), col.end(), v) - col.begin());
            hd(static_cast<Eigen::Index>(i), j) = static_cast<double>(std::min(le, ge)) / static_cast<double>(n);
        }
        const std::size_t kk = std::max<std::size_t>(k, 1);
        if (n >= kk && n - kk >= kk - 1) region[static_cast<std::size_t>(j)] = col[n - kk] - col[kk - 1];
    }

    std::vector<double> w(static_cast<std::size_t>(tau));
    double total = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = dt[j] * region[j];
        total += w[j];
    }
    if (tau == 1) {
        w[0] = 1.0;
        total = 1.0;
    } else if (!(total > 0.0)) {
        if (!time_only_fallback) throw std::domain_error("every depth region is empty; weights undefined");
        res.time_only_weights = true;
        total = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] = dt[j];
            total += w[j];
        }
    }
    for (double& v : w) v /= total;
    res.weights = w;
    res.depths = hd * Eigen::Map<const Eigen::VectorXd>(w.data(), tau);
    return res;
}

double bootstrap_threshold(const Eigen::MatrixXd& x, const BootstrapParams& params, RngSeed seed) {
    if (params.replicates < 1) throw std::invalid_argument("need at least one bootstrap replicate");
    const Eigen::Index N = x.rows();
    const Eigen::Index tau = x.cols();
    if (N < 2) throw std::invalid_argument("bootstrap needs N >= 2");

    const DepthResult base = mfhd(x, params.alpha, {}, true);
    std::vector<double> weights(static_cast<std::size_t>(N));
    for (Eigen::Index n = 0; n < N; ++n) weights[static_cast<std::size_t>(n)] = base.depths(n) + 1e-12;

    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centred = x.rowwise() - mean;
    const Eigen::MatrixXd sigma = (centred.transpose() * centred) / static_cast<double>(N - 1);
    Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(tau, tau);  // upper triangular, noise = z * factor
    if (params.gamma > 0.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(params.gamma * sigma);
        if (llt.info() == Eigen::Success) {
            factor = llt.matrixU();
        } else {
            for (Eigen::Index j = 0; j < tau; ++j) factor(j, j) = std::sqrt(std::max(0.0, params.gamma * sigma(j, j)));
        }
    }

    std::vector<double> c(static_cast<std::size_t>(params.replicates));
    parallel_for(c.size(), params.workers, [&](std::size_t b) {
        std::mt19937_64 rng(seed.derive(b).value);
        std::discrete_distribution<Eigen::Index> pick(weights.begin(), weights.end());
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::MatrixXd sample(N, tau);
        for (Eigen::Index n = 0; n < N; ++n) sample.row(n) = x.row(pick(rng));
        if (params.gamma > 0.0) {
            Eigen::MatrixXd z(N, tau);
            for (Eigen::Index n = 0; n < N; ++n)
                for (Eigen::Index j = 0; j < tau; ++j) z(n, j) = normal(rng);
            sample.noalias() += z * factor.triangularView<Eigen::Upper>();
        }
        const DepthResult d = mfhd(sample, params.alpha, {}, true);
        std::vector<double> v(d.depths.data(), d.depths.data() + N);
        c[b] = stats::quantile(std::move(v), params.percentile);
    });
    return stats::median(std::move(c));
}

FunctionalResult functional_detect(const Eigen::MatrixXd& x, const FunctionalParams& params, RngSeed seed) {
    const Eigen::Index N = x.rows();
    const auto n = static_cast<std::size_t>(N);
    FunctionalResult res;
    res.depth.assign(n, 0.0);
    res.iteration_flagged.assign(n, 0);
    if (N < params.min_patterns) {
        res.detection = IntervalDetection::abstain(n, "fewer patterns than the functional detector needs");
        return res;
    }
    res.threshold = bootstrap_threshold(x, params.bootstrap, seed);

    std::vector<Eigen::Index> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = static_cast<Eigen::Index>(i);
    for (int iter = 1; !active.empty(); ++iter) {
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(active.size()), x.cols());
        for (std::size_t i = 0; i < active.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = x.row(active[i]);
        const DepthResult d = mfhd(sub, params.bootstrap.alpha, {}, true);
        res.iterations = iter;
        std::vector<Eigen::Index> keep;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const double depth = d.depths(static_cast<Eigen::Index>(i));
            res.depth[static_cast<std::size_t>(active[i])] = depth;
            if (depth < res.threshold) res.iteration_flagged[static_cast<std::size_t>(active[i])] = iter;
            else keep.push_back(active[i]);
        }
        if (keep.size() == active.size()) break;
        active = std::move(keep);
    }

    IntervalDetection& det = res.detection;
    det.score_threshold = -res.threshold;
    det.flags.resize(n);
    det.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        det.scores[i] = -res.depth[i];
        det.flags[i] = res.iteration_flagged[i] > 0;
    }
    return res;
}

FunctionalResult FunctionalDepthDetector::run(const Eigen::MatrixXd& prefix) const {
    return functional_detect(prefix, params_, seed_.derive(static_cast<std::uint64_t>(prefix.cols())));
}

IntervalDetection FunctionalDepthDetector::detect(const Eigen::MatrixXd& prefix) const { return run(prefix).detection; }

}  // namespace rmsim
