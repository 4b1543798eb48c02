#pragma once

#include <iosfwd>
#include <vector>

#include "rmsim/model.hpp"

namespace rmsim {

/// How a forecast run counts demand per fare class.
enum class AvailabilityPolicy {
    /// Class j demand = requests whose willingness-to-pay threshold is class j,
    /// observed with nothing censored.
    IndependentClassDemand,
    /// Class j demand = requests that would book if j were the cheapest open
    /// class (cumulative over classes 1..j).
    LowestOpenClass,
};

struct ForecastSet {
    std::vector<double> mu;
    std::vector<double> var;
    std::vector<double> se_mu;
    std::vector<double> se_var;
    int n_runs = 0;
    AvailabilityPolicy basis = AvailabilityPolicy::IndependentClassDemand;

    /// Builds a forecast from given moments; standard errors follow from n_runs.
    static ForecastSet from_moments(std::vector<double> mu, std::vector<double> var, int n_runs,
                                    AvailabilityPolicy basis = AvailabilityPolicy::IndependentClassDemand);
    std::size_t size() const { return mu.size(); }
};

/// Monte-Carlo forecast over n_runs uncontrolled horizons (run r uses seed.derive(r)).
/// @throws std::invalid_argument if n_runs < 2.
ForecastSet forecast_demand(const DemandScenario& s, int n_runs, RngSeed seed,
                            AvailabilityPolicy availability = AvailabilityPolicy::IndependentClassDemand,
                            unsigned workers = 1);

void write_forecast_csv(std::ostream& os, const ForecastSet& f, const FareStructure& fares);

}  // namespace rmsim
