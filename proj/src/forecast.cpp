#include "rmsim/forecast.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "rmsim/demand.hpp"
#include "rmsim/parallel.hpp"

namespace rmsim {

ForecastSet ForecastSet::from_moments(std::vector<double> mu, std::vector<double> var, int n_runs,
                                      AvailabilityPolicy basis) {
    if (mu.size() != var.size()) throw std::invalid_argument("mu and var lengths differ");
    if (n_runs < 2) throw std::invalid_argument("forecast needs at least 2 runs");
    ForecastSet f;
    f.mu = std::move(mu);
    f.var = std::move(var);
    f.n_runs = n_runs;
    f.basis = basis;
    for (double v : f.var) {
        if (v < 0.0) throw std::invalid_argument("negative forecast variance");
        f.se_mu.push_back(std::sqrt(v / n_runs));
        f.se_var.push_back(v * std::sqrt(2.0 / (n_runs - 1)));
    }
    return f;
}

ForecastSet forecast_demand(const DemandScenario& s, int n_runs, RngSeed seed, AvailabilityPolicy availability,
                            unsigned workers) {
    if (n_runs < 2) throw std::invalid_argument("forecast needs at least 2 runs");
    s.validate();
    const std::size_t J = s.fare_structure.size();
    std::vector<std::vector<double>> counts(static_cast<std::size_t>(n_runs), std::vector<double>(J, 0.0));
    parallel_for(counts.size(), workers, [&](std::size_t r) {
        const RequestStream stream = sample_requests(s, seed.derive(r));
        auto& row = counts[r];
        for (const auto& req : stream.requests) {
            if (req.wtp_class != kNoBuy) row[static_cast<std::size_t>(req.wtp_class)] += 1.0;
        }
        if (availability == AvailabilityPolicy::LowestOpenClass) {
            for (std::size_t j = 1; j < J; ++j) row[j] += row[j - 1];
        }
    });

    std::vector<double> mu(J, 0.0), var(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
        double m = 0.0;
        for (const auto& row : counts) m += row[j];
        m /= n_runs;
        double ss = 0.0;
        for (const auto& row : counts) ss += (row[j] - m) * (row[j] - m);
        mu[j] = m;
        var[j] = ss / (n_runs - 1);
    }
    return ForecastSet::from_moments(std::move(mu), std::move(var), n_runs, availability);
}

void write_forecast_csv(std::ostream& os, const ForecastSet& f, const FareStructure& fares) {
    os << "class_label,fare,mu,var,se_mu,se_var\n";
    char buf[160];
    for (std::size_t j = 0; j < f.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f", f.mu[j], f.var[j], f.se_mu[j], f.se_var[j]);
        os << fares.classes.at(j).label << ',' << fares.classes.at(j).fare << ',' << buf << '\n';
    }
}

}  // namespace rmsim
