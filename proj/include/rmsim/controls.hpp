#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rmsim/forecast.hpp"
#include "rmsim/model.hpp"

namespace rmsim {

enum class Heuristic { EMSRb, EMSRbMR, FCFS };

std::string to_string(Heuristic h);
Heuristic heuristic_from_string(const std::string& s);

/// Nested booking limits. limits[0] = capacity and limits[j] = capacity - protection[j-1].
struct BookingControls {
    std::vector<int> limits;
    std::vector<int> protection;
    std::vector<double> raw_protection;  ///< before rounding
    Heuristic heuristic = Heuristic::EMSRb;
    int capacity = 0;

    std::size_t size() const { return limits.size(); }
};

/// EMSRb protection levels PL_j = mu + z sigma over classes 1..j, with
/// z = Phi^-1(1 - r_{j+1} / weighted-average fare). Rounded to the nearest seat.
BookingControls emsrb(const std::vector<double>& mu, const std::vector<double>& var, const std::vector<double>& fares,
                      int capacity);

struct MarginalTransform {
    std::vector<double> adj_mu;     ///< mu_j - mu_{j-1}
    std::vector<double> adj_fares;  ///< (r_j mu_j - r_{j-1} mu_{j-1}) / (mu_j - mu_{j-1})
    std::vector<bool> degenerate;   ///< zero incremental demand; fare copied from the previous class
    std::vector<bool> inefficient;  ///< opening the class lowers expected revenue
};

/// Marginal-revenue transformation of cumulative lowest-open-class demand.
/// @throws std::invalid_argument if mu_cum decreases or lengths differ.
MarginalTransform marginal_revenue_transform(const std::vector<double>& mu_cum, const std::vector<double>& fares);

/// Cumulative demand from sell-up probabilities: mu_j = mu_n * psup_j.
std::vector<double> sellup_cumulative_demand(double mu_n, const std::vector<double>& psup);

/// EMSRb applied to marginal fares and demand increments. Inefficient classes
/// keep the protection level of the class above them.
BookingControls emsrb_mr(const ForecastSet& forecast, const std::vector<double>& fares, int capacity);

/// No control: every class is open until the cabin is full.
BookingControls fcfs(std::size_t n_classes, int capacity);

BookingControls compute_controls(Heuristic h, const ForecastSet& forecast, const std::vector<double>& fares,
                                 int capacity);

/// Share of each class's demand that has arrived by time t in [0, 1]
/// (segment Beta CDFs weighted by phi_i p_ij).
std::vector<double> arrived_fraction_by_class(const DemandScenario& s, double t);

/// Re-optimizes with remaining capacity C - sold and remaining demand
/// mu_j (1 - arrived_j), var_j (1 - arrived_j). The result is expressed in
/// remaining seats: its capacity is C - sold.
/// @throws std::invalid_argument if sold is outside [0, C].
BookingControls recompute_midhorizon(const BookingControls& controls, const ForecastSet& corrected,
                                     const std::vector<double>& fares, int sold,
                                     const std::vector<double>& arrived_fraction);
BookingControls recompute_midhorizon(const BookingControls& controls, const ForecastSet& corrected,
                                     const std::vector<double>& fares, int sold, double arrived_fraction);

void write_controls_csv(std::ostream& os, const BookingControls& c, const FareStructure& fares);

}  // namespace rmsim
