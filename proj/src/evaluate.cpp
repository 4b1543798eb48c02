#include "rmsim/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rmsim/parallel.hpp"
#include "rmsim/stats.hpp"

namespace rmsim {

std::optional<double> ConfusionCounts::tpr() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::optional<double> ConfusionCounts::fpr() const {
    if (fp + tn == 0) return std::nullopt;
    return static_cast<double>(fp) / static_cast<double>(fp + tn);
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
}

ConfusionCounts confusion(const std::vector<bool>& flags, const std::vector<bool>& truth) {
    if (flags.size() != truth.size()) throw std::invalid_argument("flags and truth lengths differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (truth[i]) (flags[i] ? c.tp : c.fn) += 1;
        else (flags[i] ? c.fp : c.tn) += 1;
    }
    return c;
}

std::optional<double> bcr(const ConfusionCounts& c) {
    const auto tpr = c.tpr();
    const auto fpr = c.fpr();
    if (!tpr || !fpr) return std::nullopt;
    return 0.5 * (*tpr + (1.0 - *fpr));
}

std::optional<double> lr_plus(const ConfusionCounts& c) {
    const auto tpr = c.tpr();
    const auto fpr = c.fpr();
    if (!tpr || !fpr) return std::nullopt;
    if (*fpr == 0.0) {
        if (*tpr > 0.0) return std::numeric_limits<double>::infinity();
        return std::nullopt;
    }
    return *tpr / *fpr;
}

RocCurve roc_sweep(const std::vector<double>& scores, const std::vector<bool>& truth, int n_thresholds) {
    if (scores.size() != truth.size()) throw std::invalid_argument("scores and truth lengths differ");
    long pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw std::invalid_argument("ROC scores must be finite");
        (truth[i] ? pos : neg) += 1;
    }
    if (pos == 0 || neg == 0) throw std::invalid_argument("ROC needs both classes");

    std::vector<double> thresholds;
    if (n_thresholds > 0) {
        const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
        for (int k = 0; k < n_thresholds; ++k)
            thresholds.push_back(n_thresholds == 1 ? *mn : *mn + (*mx - *mn) * k / (n_thresholds - 1.0));
    } else {
        thresholds = scores;
    }
    thresholds.push_back(std::numeric_limits<double>::infinity());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    std::size_t i = 0;
    long tp = 0, fp = 0;
    for (double th : thresholds) {
        while (i < order.size() && scores[order[i]] >= th) {
            (truth[order[i]] ? tp : fp) += 1;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos, th});
    }
    if (curve.points.back().fpr < 1.0 || curve.points.back().tpr < 1.0) {
        curve.points.push_back({1.0, 1.0, -std::numeric_limits<double>::infinity()});
    }
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const auto& a = curve.points[k - 1];
        const auto& b = curve.points[k];
        curve.auc += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }
    return curve;
}

// ---- registry --------------------------------------------------------------------

std::string DetectorSpec::name() const { return extrapolation ? id + "+" + to_string(*extrapolation) : id; }

const std::vector<std::string>& detector_ids() {
    static const std::vector<std::string> ids{"percentile",         "np_tolerance",       "poisson_tolerance",
                                              "robust_z",           "euclidean_distance", "manhattan_distance",
                                              "kmeans_euclidean",   "kmeans_manhattan",   "functional_depth"};
    return ids;
}

DetectorSpec parse_detector(const std::string& name) {
    DetectorSpec spec;
    const auto plus = name.find('+');
    spec.id = name.substr(0, plus);
    const auto& ids = detector_ids();
    if (std::find(ids.begin(), ids.end(), spec.id) == ids.end()) {
        std::string valid;
        for (const auto& id : ids) valid += (valid.empty() ? "" : ", ") + id;
        throw std::invalid_argument("unknown detector: " + spec.id + " (valid: " + valid + ")");
    }
    if (plus != std::string::npos) spec.extrapolation = extrapolation_method_from_string(name.substr(plus + 1));
    return spec;
}

std::shared_ptr<const Detector> make_detector(const DetectorSpec& spec, int n_intervals, double capacity, RngSeed seed,
                                              unsigned workers) {
    std::shared_ptr<const Detector> d;
    if (spec.id == "percentile") d = std::make_shared<PercentileDetector>();
    else if (spec.id == "np_tolerance") d = std::make_shared<ToleranceDetector>();
    else if (spec.id == "poisson_tolerance") d = std::make_shared<PoissonToleranceDetector>();
    else if (spec.id == "robust_z") d = std::make_shared<RobustZDetector>();
    else if (spec.id == "euclidean_distance") d = std::make_shared<DistanceDetector>(Metric::Euclidean);
    else if (spec.id == "manhattan_distance") d = std::make_shared<DistanceDetector>(Metric::Manhattan);
    else if (spec.id == "kmeans_euclidean") d = std::make_shared<KMeansDetector>(spec.kmeans_k, Metric::Euclidean, seed);
    else if (spec.id == "kmeans_manhattan") d = std::make_shared<KMeansDetector>(spec.kmeans_k, Metric::Manhattan, seed);
    else if (spec.id == "functional_depth") {
        FunctionalParams p = spec.functional;
        p.bootstrap.workers = workers;
        d = std::make_shared<FunctionalDepthDetector>(p, seed);
    } else {
        parse_detector(spec.id);  // throws with the list of valid ids
    }
    if (spec.extrapolation) d = std::make_shared<ExtrapolatingDetector>(d, *spec.extrapolation, n_intervals, capacity, workers);
    return d;
}

DetectionRun run_detector(const Detector& detector, const Collection& collection, const std::vector<int>& taus) {
    DetectionRun run;
    run.method = detector.id();
    run.taus = taus;
    for (int tau : taus) run.per_interval.push_back(detector.detect(collection.totals(tau)));
    return run;
}

// ---- sweeps ------------------------------------------------------------------------

std::vector<SweepRow> foresight_sweep(const std::vector<Collection>& replications,
                                      const std::vector<DetectorSpec>& detectors, const std::vector<int>& taus,
                                      RngSeed seed, unsigned workers) {
    if (detectors.empty()) throw std::invalid_argument("no detectors given");
    const std::size_t R = replications.size(), D = detectors.size(), K = taus.size();
    struct Cell {
        ConfusionCounts counts;
        bool abstained = false;
    };
    std::vector<Cell> cells(R * D * K);
    // Parallel over (replication, detector); the detector's own work stays serial.
    parallel_for(R * D, workers, [&](std::size_t rd) {
        const std::size_t r = rd / D, d = rd % D;
        const Collection& c = replications[r];
        const auto det = make_detector(detectors[d], c.n_intervals, c.capacity, seed.derive(r, d), 1);
        const auto truth = c.truth();
        for (std::size_t k = 0; k < K; ++k) {
            const IntervalDetection res = det->detect(c.totals(taus[k]));
            Cell& cell = cells[(r * D + d) * K + k];
            cell.abstained = res.abstained;
            cell.counts = confusion(res.flags, truth);
        }
    });

    std::vector<SweepRow> rows;
    for (std::size_t d = 0; d < D; ++d) {
        for (std::size_t k = 0; k < K; ++k) {
            SweepRow row;
            row.detector = detectors[d].name();
            row.tau = taus[k];
            for (std::size_t r = 0; r < R; ++r) {
                const Cell& cell = cells[(r * D + d) * K + k];
                if (cell.abstained) {
                    ++row.abstentions;
                    row.replication_bcr.push_back(std::nullopt);
                    continue;
                }
                row.pooled += cell.counts;
                row.replication_bcr.push_back(bcr(cell.counts));
            }
            row.tpr = row.pooled.tpr();
            row.fpr = row.pooled.fpr();
            row.bcr = bcr(row.pooled);
            row.lr_plus = lr_plus(row.pooled);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<HindsightRow> hindsight_report(const std::vector<SweepRow>& sweep, int n_intervals) {
    std::vector<HindsightRow> out;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<const SweepRow*>> groups;
    for (const auto& row : sweep) {
        auto [it, inserted] = index.emplace(row.detector, out.size());
        if (inserted) {
            out.push_back({row.detector, std::nullopt, std::nullopt, {}});
            groups.emplace_back();
        }
        groups[it->second].push_back(&row);
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        double sum = 0.0;
        int count = 0;
        std::vector<double> rep_sum;
        std::vector<int> rep_count;
        for (const SweepRow* row : groups[g]) {
            if (row->tau == n_intervals) out[g].final_bcr = row->bcr;
            if (row->tau < 2) continue;
            if (row->bcr) {
                sum += *row->bcr;
                ++count;
            }
            rep_sum.resize(row->replication_bcr.size(), 0.0);
            rep_count.resize(row->replication_bcr.size(), 0);
            for (std::size_t r = 0; r < row->replication_bcr.size(); ++r) {
                if (row->replication_bcr[r]) {
                    rep_sum[r] += *row->replication_bcr[r];
                    ++rep_count[r];
                }
            }
        }
        if (count > 0) out[g].mean_bcr = sum / count;
        for (std::size_t r = 0; r < rep_sum.size(); ++r) {
            out[g].replication_mean_bcr.push_back(rep_count[r] > 0 ? rep_sum[r] / rep_count[r]
                                                                   : std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

std::vector<HindsightRow> hindsight_report(const std::vector<Collection>& replications,
                                           const std::vector<DetectorSpec>& detectors, RngSeed seed,
                                           unsigned workers) {
    if (replications.empty()) throw std::invalid_argument("no replications given");
    const int T = replications.front().n_intervals;
    std::vector<int> taus;
    for (int t = 2; t <= T; ++t) taus.push_back(t);
    return hindsight_report(foresight_sweep(replications, detectors, taus, seed, workers), T);
}

SignTest sign_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
    SignTest s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) ++s.wins;
        else if (a[i] < b[i]) ++s.losses;
        else ++s.ties;
    }
    const int n = s.wins + s.losses;
    s.p_value = n == 0 ? 1.0 : 1.0 - stats::binomial_cdf(s.wins - 1, n, 0.5);
    return s;
}

// ---- revenue gain --------------------------------------------------------------------

std::vector<RevenueGainRow> revenue_gain_experiment(const DemandScenario& base, const RevenueGainConfig& config,
                                                    RngSeed seed, unsigned workers) {
    if (config.n_reps < 1) throw std::invalid_argument("need at least one replication");
    std::vector<RevenueGainRow> rows;
    for (std::size_t fi = 0; fi < config.demand_factors.size(); ++fi) {
        const double fd = config.demand_factors[fi];
        const DemandScenario regular = scale_to_demand_factor(base, fd);
        const auto fares = regular.fare_structure.fares();
        const int C = regular.fare_structure.capacity;
        const int T = regular.n_intervals;
        const ForecastSet regular_fc = forecast_demand(regular, config.forecast_runs, seed.derive(1, fi));

        for (std::size_t mi = 0; mi < config.magnitudes.size(); ++mi) {
            const double pct = config.magnitudes[mi];
            const DemandScenario outlier = make_volume_outlier(regular, pct);
            const ForecastSet corrected_fc = forecast_demand(outlier, config.forecast_runs, seed.derive(2, fi * 1000 + mi));
            const RngSeed stream_seed = seed.derive(3, fi * 1000 + mi);

            for (Heuristic h : config.heuristics) {
                const BookingControls controls = compute_controls(h, regular_fc, fares, C);
                auto make_switch = [&](int tau) {
                    const auto arrived = arrived_fraction_by_class(outlier, static_cast<double>(tau) / T);
                    return ControlSwitch{tau, [&, arrived](int sold) {
                                             return recompute_midhorizon(controls, corrected_fc, fares, sold, arrived);
                                         }};
                };

                // Each unit is one outlier horizon: (uncorrected, corrected per tau).
                std::vector<double> uncorrected;
                std::vector<std::vector<double>> corrected(config.correction_intervals.size());

                if (!config.gate) {
                    uncorrected.resize(static_cast<std::size_t>(config.n_reps));
                    for (auto& v : corrected) v.resize(static_cast<std::size_t>(config.n_reps));
                    parallel_for(static_cast<std::size_t>(config.n_reps), workers, [&](std::size_t r) {
                        const RequestStream stream = sample_requests(outlier, stream_seed.derive(r));
                        uncorrected[r] = run_horizon(stream, controls, regular.fare_structure, T).final_revenue();
                        for (std::size_t k = 0; k < config.correction_intervals.size(); ++k) {
                            corrected[k][r] = run_horizon(stream, controls, regular.fare_structure, T,
                                                          make_switch(config.correction_intervals[k]))
                                                  .final_revenue();
                        }
                    });
                } else {
                    CollectionConfig cc = config.gate_collection;
                    cc.outlier_kinds = {OutlierSpec::volume(pct)};
                    for (int r = 0; r < config.n_reps; ++r) {
                        const RngSeed rep_seed = stream_seed.derive(static_cast<std::uint64_t>(r));
                        const Collection col = build_collection(cc, regular, controls, rep_seed, workers);
                        const auto det = make_detector(*config.gate, T, C, rep_seed.derive(7), workers);
                        std::vector<std::vector<bool>> flagged;
                        for (int tau : config.correction_intervals) {
                            flagged.push_back(tau >= 1 ? det->detect(col.totals(std::min(tau, T))).flags
                                                       : std::vector<bool>(col.size(), false));
                        }
                        for (std::size_t i = 0; i < col.size(); ++i) {
                            if (!col.patterns[i].truth.is_outlier()) continue;
                            const RequestStream stream = sample_requests(outlier, rep_seed.derive(i, 1));
                            const double u = col.patterns[i].final_revenue();
                            uncorrected.push_back(u);
                            for (std::size_t k = 0; k < config.correction_intervals.size(); ++k) {
                                corrected[k].push_back(
                                    flagged[k][i] ? run_horizon(stream, controls, regular.fare_structure, T,
                                                                make_switch(config.correction_intervals[k]))
                                                        .final_revenue()
                                                  : u);
                            }
                        }
                    }
                }

                const double n = static_cast<double>(uncorrected.size());
                const double mean_u = n > 0 ? std::accumulate(uncorrected.begin(), uncorrected.end(), 0.0) / n : 0.0;
                for (std::size_t k = 0; k < config.correction_intervals.size(); ++k) {
                    RevenueGainRow row;
                    row.heuristic = h;
                    row.demand_factor = fd;
                    row.magnitude = pct;
                    row.correction_interval = config.correction_intervals[k];
                    row.n = static_cast<long>(n);
                    row.mean_uncorrected = mean_u;
                    if (n > 0 && mean_u > 0.0) {
                        std::vector<double> diff(uncorrected.size());
                        for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = corrected[k][r] - uncorrected[r];
                        const double md = stats::mean(diff);
                        const double se = n > 1 ? std::sqrt(stats::variance(diff) / n) : 0.0;
                        row.mean_corrected = mean_u + md;
                        row.pct_change = 100.0 * md / mean_u;
                        row.ci_low = 100.0 * (md - 1.959964 * se) / mean_u;
                        row.ci_high = 100.0 * (md + 1.959964 * se) / mean_u;
                    }
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

}  // namespace rmsim
