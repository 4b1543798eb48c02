#include "rmsim/reference_data.hpp"

#include <cmath>
#include <stdexcept>

namespace rmsim::reference {

namespace {

std::size_t factor_index(double demand_factor) {
    for (std::size_t i = 0; i < kDemandFactors.size(); ++i) {
        if (std::abs(kDemandFactors[i] - demand_factor) < 1e-9) return i;
    }
    throw std::invalid_argument("no published table for this demand factor");
}

}  // namespace

ForecastSet published_forecast(double demand_factor) {
    static const std::vector<double> mu[3] = {{31.9, 17.5, 20.0, 16.8, 13.4, 12.3, 52.6},
                                              {46.2, 24.2, 28.6, 22.9, 18.5, 16.9, 69.8},
                                              {52.7, 28.3, 33.6, 26.1, 21.6, 21.0, 81.8}};
    static const std::vector<double> var[3] = {{23.0, 14.2, 14.2, 16.1, 11.5, 14.3, 19.2},
                                               {25.3, 18.8, 25.5, 26.6, 16.5, 11.2, 28.2},
                                               {32.2, 30.5, 31.8, 23.8, 18.8, 21.1, 33.8}};
    const std::size_t i = factor_index(demand_factor);
    return ForecastSet::from_moments(mu[i], var[i], 100);
}

std::vector<int> published_limits(Heuristic h, double demand_factor) {
    static const std::vector<int> emsrb[3] = {{200, 171, 155, 134, 117, 104, 91},
                                              {200, 157, 134, 105, 81, 62, 45},
                                              {200, 151, 125, 90, 62, 39, 18}};
    static const std::vector<int> emsrb_mr[3] = {{200, 165, 155, 125, 109, 109, 96},
                                                 {200, 151, 134, 95, 72, 72, 51},
                                                 {200, 144, 125, 79, 52, 52, 24}};
    const std::size_t i = factor_index(demand_factor);
    if (h == Heuristic::EMSRb) return emsrb[i];
    if (h == Heuristic::EMSRbMR) return emsrb_mr[i];
    throw std::invalid_argument("no published limits for this heuristic");
}

const std::vector<RevenueFactors>& published_revenue_factors() {
    static const std::vector<RevenueFactors> rows{
        {0.9, 28948.50, 1.03, 1.06}, {1.2, 34835.50, 1.04, 1.08}, {1.5, 35000.00, 1.05, 1.09}};
    return rows;
}

const std::vector<RevenueCorrection>& published_revenue_corrections() {
    static const std::vector<RevenueCorrection> rows{
        {Heuristic::EMSRb, 0.9, {0.1, 0.1, -0.9, -3.6}},    {Heuristic::EMSRb, 1.2, {10.2, 6.4, -2.3, -2.3}},
        {Heuristic::EMSRb, 1.5, {12.2, 4.4, -4.5, -6.8}},   {Heuristic::EMSRbMR, 0.9, {2.3, 1.3, 0.4, 2.9}},
        {Heuristic::EMSRbMR, 1.2, {2.0, 4.1, 4.4, 9.9}},    {Heuristic::EMSRbMR, 1.5, {16.2, 7.7, 5.0, 9.5}}};
    return rows;
}

}  // namespace rmsim::reference
