#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmsim/model.hpp"

namespace rmsim {

/// Result of one detector at one interval. Scores are oriented so that larger
/// means more outlying and flags[n] == (scores[n] > score_threshold).
struct IntervalDetection {
    std::vector<bool> flags;
    std::vector<double> scores;
    double score_threshold = 0.0;
    double threshold_lo = std::numeric_limits<double>::quiet_NaN();  ///< value-scale bounds, if any
    double threshold_hi = std::numeric_limits<double>::quiet_NaN();
    bool abstained = false;
    std::string note;

    static IntervalDetection abstain(std::size_t n, std::string why);
};

/// A detector classifies every row of an N x tau prefix matrix (row = pattern,
/// column = interval). Univariate detectors only read the last column.
class Detector {
public:
    virtual ~Detector() = default;
    virtual std::string id() const = 0;
    virtual IntervalDetection detect(const Eigen::MatrixXd& prefix) const = 0;
};

class PercentileDetector : public Detector {
public:
    explicit PercentileDetector(double lower = 0.025, double upper = 0.975) : lower_(lower), upper_(upper) {}
    std::string id() const override { return "percentile"; }
    IntervalDetection detect(const Eigen::MatrixXd& prefix) const override;

private:
    double lower_, upper_;
};

/// Order-statistic index pair of the Wilks nonparametric tolerance interval.
struct WilksInterval {
    int k = 0;  ///< s - r
    int r = 0;  ///< 1-based lower order statistic
    int s = 0;  ///< 1-based upper order statistic
};

/// Smallest k with P(Binomial(N, coverage) <= k-1) >= confidence; nullopt if k > N.
std::optional<WilksInterval> wilks_interval(int n, double coverage, double confidence);

class ToleranceDetector : public Detector {
public:
    explicit ToleranceDetector(double coverage = 0.95, double confidence = 0.95)
        : coverage_(coverage), confidence_(confidence) {}
    std::string id() const override { return "np_tolerance"; }
    IntervalDetection detect(const Eigen::MatrixXd& prefix) const override;

private:
    double coverage_, confidence_;
};

struct PoissonBounds {
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    long lower = -1;  ///< values below are flagged; -1 means no lower bound
    long upper = 0;   ///< values above are flagged
};

/// Chi-square confidence interval for lambda from count y over n units, then
/// the Poisson CDF scan for the tolerance bounds at content `coverage`.
PoissonBounds poisson_tolerance_bounds(long y, double n, double coverage = 0.95, double alpha = 0.05);

/// Poisson tolerance interval anchored at the rounded collection median.
class PoissonToleranceDetector : public Detector {
public:
    explicit PoissonToleranceDetector(double coverage = 0.95, double alpha = 0.05)
        : coverage_(coverage), alpha_(alpha) {}
    std::string id() const override { return "poisson_tolerance"; }
    IntervalDetection detect(const Eigen::MatrixXd& prefix) const override;

private:
    double coverage_, alpha_;
};

/// |0.6745 (y - median) / MAD| > cutoff. With MAD = 0 every value off the median is flagged.
class RobustZDetector : public Detector {
public:
    explicit RobustZDetector(double cutoff = 3.5) : cutoff_(cutoff) {}
    std::string id() const override { return "robust_z"; }
    IntervalDetection detect(const Eigen::MatrixXd& prefix) const override;

private:
    double cutoff_;
};

enum class Metric { Euclidean, Manhattan };
std::string to_string(Metric m);

double distance(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b, Metric m);

/// Mean distance to all other patterns; flagged when above mean + 3 sd of those means.
class DistanceDetector : public Detector {
public:
    explicit DistanceDetector(Metric metric = Metric::Euclidean) : metric_(metric) {}
    std::string id() const override { return to_string(metric_) + "_distance"; }
    IntervalDetection detect(const Eigen::MatrixXd& prefix) const override;

private:
    Metric metric_;
};

enum class KMeansInit { FarthestFirst, RandomAssign };

struct KMeansResult {
    std::vector<int> assignment;
    Eigen::MatrixXd centres;            ///< K x tau
    std::vector<double> objective;      ///< within-cluster sum of squares after each iteration
    int iterations = 0;
};

/// Lloyd iterations (at most max_iter) with mean centres. An empty cluster is
/// re-seeded at the point farthest from its assigned centre.
KMeansResult kmeans(const Eigen::MatrixXd& x, int k, Metric metric, RngSeed seed,
                    KMeansInit init = KMeansInit::FarthestFirst, int max_iter = 100);

/// Distance to own cluster centre; flagged when above (max + min) / 2.
class KMeansDetector : public Detector {
public:
    KMeansDetector(int k = 2, Metric metric = Metric::Euclidean, RngSeed seed = {0},
                   KMeansInit init = KMeansInit::FarthestFirst)
        : k_(k), metric_(metric), seed_(seed), init_(init) {}
    std::string id() const override { return "kmeans_" + to_string(metric_); }
    IntervalDetection detect(const Eigen::MatrixXd& prefix) const override;

private:
    int k_;
    Metric metric_;
    RngSeed seed_;
    KMeansInit init_;
};

}  // namespace rmsim
