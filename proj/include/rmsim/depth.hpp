#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rmsim/detect_baseline.hpp"
#include "rmsim/model.hpp"

namespace rmsim {

/// (1/N) min(#{y <= x}, #{y >= x}).
double halfspace_depth_1d(std::span<const double> sample, double x);

struct DepthResult {
    Eigen::VectorXd depths;
    std::vector<double> weights;  ///< per interval, summing to 1
    double alpha = 0.125;
    bool time_only_weights = false;  ///< every alpha-region was empty
};

/// Multivariate functional halfspace depth of every row of x (N x tau).
/// Interval j is weighted by (t_{j+1} - t_j) times the length of its alpha
/// depth region, with t_{tau+1} = t_tau + (t_tau - t_{tau-1}) / 2. `times`
/// defaults to 1..tau. When every region is empty this throws
/// std::domain_error unless `time_only_fallback` is set, in which case the
/// region factor is dropped.
DepthResult mfhd(const Eigen::MatrixXd& x, double alpha = 0.125, std::span<const double> times = {},
                 bool time_only_fallback = false);

struct BootstrapParams {
    int replicates = 1000;
    double percentile = 0.01;
    double gamma = 0.05;  ///< smoothing noise covariance is gamma * Sigma
    double alpha = 0.125;
    unsigned workers = 1;
};

/// Median over replicates of the `percentile` quantile of depths in a
/// depth-weighted, Gaussian-smoothed resample of the rows of x. Replicate b
/// draws from seed.derive(b). A Sigma without a Cholesky factor falls back to
/// its diagonal.
double bootstrap_threshold(const Eigen::MatrixXd& x, const BootstrapParams& params, RngSeed seed);

struct FunctionalParams {
    BootstrapParams bootstrap;
    int min_patterns = 10;
};

struct FunctionalResult {
    IntervalDetection detection;        ///< scores are negated depths
    std::vector<double> depth;          ///< depth at the last iteration each pattern took part in
    std::vector<int> iteration_flagged; ///< 0 when never flagged
    double threshold = 0.0;
    int iterations = 0;
};

/// Iterative trimming: flag depths below the bootstrap threshold, drop them,
/// recompute depths on the rest, until no new flags. The threshold is
/// estimated once, on the full sample.
FunctionalResult functional_detect(const Eigen::MatrixXd& x, const FunctionalParams& params, RngSeed seed);

class FunctionalDepthDetector : public Detector {
public:
    explicit FunctionalDepthDetector(FunctionalParams params = {}, RngSeed seed = {0}) : params_(params), seed_(seed) {}
    std::string id() const override { return "functional_depth"; }
    /// Uses seed.derive(prefix.cols()) so each interval draws its own bootstrap stream.
    IntervalDetection detect(const Eigen::MatrixXd& prefix) const override;
    FunctionalResult run(const Eigen::MatrixXd& prefix) const;

private:
    FunctionalParams params_;
    RngSeed seed_;
};

}  // namespace rmsim
