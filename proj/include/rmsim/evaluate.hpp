#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmsim/booking.hpp"
#include "rmsim/depth.hpp"
#include "rmsim/detect_baseline.hpp"
#include "rmsim/extrapolate.hpp"

namespace rmsim {

struct ConfusionCounts {
    long tp = 0, tn = 0, fp = 0, fn = 0;

    long total() const { return tp + tn + fp + fn; }
    std::optional<double> tpr() const;
    std::optional<double> fpr() const;
    ConfusionCounts& operator+=(const ConfusionCounts& o);
};

ConfusionCounts confusion(const std::vector<bool>& flags, const std::vector<bool>& truth);

/// Balanced classification rate; nullopt when either class is empty.
std::optional<double> bcr(const ConfusionCounts& c);
/// TPR / FPR; +infinity when fp = 0 and tp > 0; nullopt when undefined.
std::optional<double> lr_plus(const ConfusionCounts& c);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;  ///< flagged iff score >= threshold
};

struct RocCurve {
    std::vector<RocPoint> points;  ///< threshold descending, so fpr and tpr ascend
    double auc = 0.0;
};

/// Sweeps thresholds over every distinct score (or an evenly spaced grid of
/// n_thresholds values when n_thresholds > 0) plus +infinity.
/// @throws std::invalid_argument on non-finite scores or a missing class.
RocCurve roc_sweep(const std::vector<double>& scores, const std::vector<bool>& truth, int n_thresholds = 0);

// ---- detector registry -----------------------------------------------------

/// Detector identifier plus parameters. Ids: percentile, np_tolerance,
/// poisson_tolerance, robust_z, euclidean_distance, manhattan_distance,
/// kmeans_euclidean, kmeans_manhattan, functional_depth.
struct DetectorSpec {
    std::string id;
    std::optional<ExtrapolationMethod> extrapolation;
    FunctionalParams functional;
    int kmeans_k = 2;

    /// id, with "+method" appended when extrapolating.
    std::string name() const;
};

const std::vector<std::string>& detector_ids();
/// Parses "functional_depth+arima" style names.
DetectorSpec parse_detector(const std::string& name);

std::shared_ptr<const Detector> make_detector(const DetectorSpec& spec, int n_intervals, double capacity, RngSeed seed,
                                              unsigned workers = 1);

struct DetectionRun {
    std::string method;
    std::vector<int> taus;
    std::vector<IntervalDetection> per_interval;  ///< aligned with taus
};

DetectionRun run_detector(const Detector& detector, const Collection& collection, const std::vector<int>& taus);

// ---- sweeps ------------------------------------------------------------------

struct SweepRow {
    std::string detector;
    int tau = 0;
    ConfusionCounts pooled;
    std::optional<double> tpr, fpr, bcr, lr_plus;
    std::vector<std::optional<double>> replication_bcr;
    int abstentions = 0;
};

/// Every detector on every tau-prefix of every replication; BCR etc. from
/// confusion counts pooled over replications. Replication r and detector d use
/// seed.derive(r, d).
std::vector<SweepRow> foresight_sweep(const std::vector<Collection>& replications,
                                      const std::vector<DetectorSpec>& detectors, const std::vector<int>& taus,
                                      RngSeed seed, unsigned workers = 1);

struct HindsightRow {
    std::string detector;
    std::optional<double> final_bcr;  ///< pooled BCR on complete patterns (tau = T)
    std::optional<double> mean_bcr;   ///< pooled BCR averaged over tau = 2..T
    std::vector<double> replication_mean_bcr;
};

/// Summarizes a sweep that covers tau = 2..T.
std::vector<HindsightRow> hindsight_report(const std::vector<SweepRow>& sweep, int n_intervals);
std::vector<HindsightRow> hindsight_report(const std::vector<Collection>& replications,
                                           const std::vector<DetectorSpec>& detectors, RngSeed seed,
                                           unsigned workers = 1);

struct SignTest {
    int wins = 0, losses = 0, ties = 0;
    double p_value = 1.0;  ///< one-sided P(X >= wins) for X ~ Binomial(wins + losses, 1/2)
};

SignTest sign_test(const std::vector<double>& a, const std::vector<double>& b);

// ---- revenue gain from correcting forecasts -----------------------------------

struct RevenueGainConfig {
    std::vector<double> demand_factors{1.5};
    std::vector<double> magnitudes{-0.25};
    std::vector<int> correction_intervals{0};
    std::vector<Heuristic> heuristics{Heuristic::EMSRbMR};
    int n_reps = 2000;
    int forecast_runs = 100;
    /// When set, only outliers this detector flags at the correction interval
    /// are corrected; patterns come from collections of gate_collection.n_patterns.
    std::optional<DetectorSpec> gate;
    CollectionConfig gate_collection{500, 0.05, {}};
};

struct RevenueGainRow {
    Heuristic heuristic = Heuristic::EMSRb;
    double demand_factor = 0.0;
    double magnitude = 0.0;
    int correction_interval = 0;
    double pct_change = 0.0;
    double ci_low = 0.0, ci_high = 0.0;  ///< 95% normal interval
    double mean_uncorrected = 0.0;
    double mean_corrected = 0.0;
    long n = 0;
};

/// Outlier horizons are booked under controls optimized for regular demand;
/// at the correction interval the controls are re-optimized from a fresh
/// forecast of the true outlier scenario for the remaining seats and demand.
/// Every cell reuses the same request streams.
std::vector<RevenueGainRow> revenue_gain_experiment(const DemandScenario& base, const RevenueGainConfig& config,
                                                    RngSeed seed, unsigned workers = 1);

}  // namespace rmsim
