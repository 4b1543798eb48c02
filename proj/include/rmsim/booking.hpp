#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rmsim/controls.hpp"
#include "rmsim/demand.hpp"
#include "rmsim/model.hpp"

namespace rmsim {

/// Replaces the controls after interval `interval` (0 = before the first request).
/// `recompute` receives the seats sold so far and returns controls expressed
/// in remaining seats.
struct ControlSwitch {
    int interval = 0;
    std::function<BookingControls(int sold)> recompute;
};

/// Books a request stream against nested controls. A request in wtp class k
/// books the cheapest open class j (largest j with sold < BL_j) iff j >= k.
/// A request at time t belongs to interval max(1, ceil(t T)).
BookingPattern run_horizon(const RequestStream& stream, const BookingControls& controls, const FareStructure& fares,
                           int n_intervals, const std::optional<ControlSwitch>& control_switch = std::nullopt);

/// A labelled set of booking patterns sharing one set of controls.
struct Collection {
    std::vector<BookingPattern> patterns;
    int n_intervals = 0;
    int capacity = 0;

    std::size_t size() const { return patterns.size(); }
    /// N x tau matrix of total cumulative bookings over the first tau intervals.
    Eigen::MatrixXd totals(int tau) const;
    std::vector<bool> truth() const;
    int n_outliers() const;
};

struct CollectionConfig {
    int n_patterns = 500;
    double outlier_frequency = 0.05;
    std::vector<OutlierSpec> outlier_kinds;
};

/// Pattern i is an outlier with probability outlier_frequency, with its kind
/// drawn uniformly from outlier_kinds. Pattern i uses seed.derive(i, 0) for the
/// label draw and seed.derive(i, 1) for its requests.
/// @throws std::invalid_argument on empty kinds with positive frequency.
Collection build_collection(const CollectionConfig& config, const DemandScenario& base,
                            const BookingControls& controls, RngSeed seed, unsigned workers = 1);

struct RevenueRow {
    double demand_factor = 0.0;
    Heuristic heuristic = Heuristic::FCFS;
    double mean_revenue = 0.0;
    double sd_revenue = 0.0;
    double mean_bookings = 0.0;
    double ratio_vs_fcfs = 0.0;
    BookingControls controls;
};

/// Supplies the forecast used to optimize controls at a given demand factor.
using ForecastProvider = std::function<ForecastSet(const DemandScenario& scenario, double demand_factor)>;

/// Monte-Carlo forecast with n_runs horizons.
ForecastProvider monte_carlo_forecasts(int n_runs, RngSeed seed, unsigned workers = 1);

/// Mean revenue per (demand factor, heuristic) with common random numbers:
/// replication r at factor index f uses the same stream for every heuristic.
std::vector<RevenueRow> revenue_comparison(const DemandScenario& base, const std::vector<double>& demand_factors,
                                           const std::vector<Heuristic>& heuristics, int n_reps, RngSeed seed,
                                           const ForecastProvider& forecasts, unsigned workers = 1);

}  // namespace rmsim
