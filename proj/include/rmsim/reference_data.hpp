#pragma once

#include <array>
#include <vector>

#include "rmsim/controls.hpp"
#include "rmsim/forecast.hpp"

namespace rmsim::reference {

/// Demand factors of the published forecast and booking-limit tables.
inline constexpr std::array<double, 3> kDemandFactors{0.9, 1.2, 1.5};

/// Published per-class forecast (N_S = 100 runs) for a demand factor in kDemandFactors.
/// @throws std::invalid_argument for other demand factors.
ForecastSet published_forecast(double demand_factor);

/// Published nested booking limits for EMSRb or EMSRb-MR.
std::vector<int> published_limits(Heuristic h, double demand_factor);

struct RevenueFactors {
    double demand_factor;
    double fcfs_revenue;
    double emsrb_ratio;
    double emsrb_mr_ratio;
};
const std::vector<RevenueFactors>& published_revenue_factors();

/// Published % revenue change from correcting the forecast for the whole
/// horizon, for magnitudes {-25%, -12.5%, +12.5%, +25%}.
struct RevenueCorrection {
    Heuristic heuristic;
    double demand_factor;
    std::array<double, 4> pct_change;
};
inline constexpr std::array<double, 4> kCorrectionMagnitudes{-0.25, -0.125, 0.125, 0.25};
const std::vector<RevenueCorrection>& published_revenue_corrections();

}  // namespace rmsim::reference
