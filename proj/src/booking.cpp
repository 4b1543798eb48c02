#include "rmsim/booking.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rmsim/parallel.hpp"

namespace rmsim {

namespace {

void check_nested(const BookingControls& c, std::size_t n_classes) {
    if (c.limits.size() != n_classes) throw std::invalid_argument("controls and fare structure disagree on class count");
    for (std::size_t j = 1; j < c.limits.size(); ++j) {
        if (c.limits[j] > c.limits[j - 1]) throw std::logic_error("booking limits are not nested");
    }
}

int interval_of(double t, int n_intervals) {
    const int k = static_cast<int>(std::ceil(t * n_intervals));
    return std::clamp(k, 1, n_intervals);
}

}  // namespace

BookingPattern run_horizon(const RequestStream& stream, const BookingControls& controls, const FareStructure& fares,
                           int n_intervals, const std::optional<ControlSwitch>& control_switch) {
    if (n_intervals < 1) throw std::invalid_argument("need at least one interval");
    const std::size_t J = fares.size();
    check_nested(controls, J);
    const auto fare = fares.fares();

    std::vector<std::vector<int>> per_interval(static_cast<std::size_t>(n_intervals), std::vector<int>(J, 0));
    std::vector<double> revenue_interval(static_cast<std::size_t>(n_intervals), 0.0);

    BookingControls active = controls;
    int sold = 0;
    int sold_at_switch = 0;
    bool switched = false;
    auto maybe_switch = [&](int interval) {
        if (control_switch && !switched && interval > control_switch->interval) {
            active = control_switch->recompute(sold);
            check_nested(active, J);
            sold_at_switch = sold;
            switched = true;
        }
    };

    for (const auto& req : stream.requests) {
        const int k = interval_of(req.time, n_intervals);
        maybe_switch(k);
        if (req.wtp_class == kNoBuy || sold >= fares.capacity) continue;
        const int rel = sold - sold_at_switch;
        int open = -1;
        for (int j = static_cast<int>(J) - 1; j >= 0; --j) {
            if (rel < active.limits[static_cast<std::size_t>(j)]) {
                open = j;
                break;
            }
        }
        if (open < 0 || open < req.wtp_class) continue;
        per_interval[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(open)] += 1;
        revenue_interval[static_cast<std::size_t>(k - 1)] += fare[static_cast<std::size_t>(open)];
        ++sold;
    }

    BookingPattern p;
    p.per_class_cumulative.assign(static_cast<std::size_t>(n_intervals), std::vector<int>(J, 0));
    p.total_cumulative.assign(static_cast<std::size_t>(n_intervals), 0);
    p.revenue_cumulative.assign(static_cast<std::size_t>(n_intervals), 0.0);
    std::vector<int> acc(J, 0);
    double rev = 0.0;
    for (std::size_t t = 0; t < per_interval.size(); ++t) {
        int total = 0;
        for (std::size_t j = 0; j < J; ++j) {
            acc[j] += per_interval[t][j];
            total += acc[j];
        }
        rev += revenue_interval[t];
        p.per_class_cumulative[t] = acc;
        p.total_cumulative[t] = total;
        p.revenue_cumulative[t] = rev;
    }
    return p;
}

Eigen::MatrixXd Collection::totals(int tau) const {
    if (tau < 1 || tau > n_intervals) throw std::invalid_argument("tau outside [1, T]");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(patterns.size()), tau);
    for (std::size_t n = 0; n < patterns.size(); ++n) {
        for (int t = 0; t < tau; ++t) m(static_cast<Eigen::Index>(n), t) = patterns[n].total_cumulative[static_cast<std::size_t>(t)];
    }
    return m;
}

std::vector<bool> Collection::truth() const {
    std::vector<bool> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) out.push_back(p.truth.is_outlier());
    return out;
}

int Collection::n_outliers() const {
    int n = 0;
    for (const auto& p : patterns) n += p.truth.is_outlier() ? 1 : 0;
    return n;
}

Collection build_collection(const CollectionConfig& config, const DemandScenario& base,
                            const BookingControls& controls, RngSeed seed, unsigned workers) {
    if (config.outlier_frequency < 0.0 || config.outlier_frequency > 1.0)
        throw std::invalid_argument("outlier frequency outside [0,1]");
    if (config.outlier_frequency > 0.0 && config.outlier_kinds.empty())
        throw std::invalid_argument("outlier frequency is positive but no outlier kinds were given");
    if (config.n_patterns < 0) throw std::invalid_argument("negative pattern count");
    base.validate();

    std::vector<DemandScenario> outlier_scenarios;
    for (const auto& spec : config.outlier_kinds) outlier_scenarios.push_back(spec.apply(base));

    Collection c;
    c.n_intervals = base.n_intervals;
    c.capacity = base.fare_structure.capacity;
    c.patterns.resize(static_cast<std::size_t>(config.n_patterns));
    parallel_for(c.patterns.size(), workers, [&](std::size_t i) {
        std::mt19937_64 rng(seed.derive(i, 0).value);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const DemandScenario* scenario = &base;
        if (u(rng) < config.outlier_frequency) {
            std::uniform_int_distribution<std::size_t> pick(0, outlier_scenarios.size() - 1);
            scenario = &outlier_scenarios[pick(rng)];
        }
        const RequestStream stream = sample_requests(*scenario, seed.derive(i, 1));
        BookingPattern p = run_horizon(stream, controls, base.fare_structure, base.n_intervals);
        p.truth = scenario->label;
        p.scenario_id = scenario->label.name;
        c.patterns[i] = std::move(p);
    });
    return c;
}

ForecastProvider monte_carlo_forecasts(int n_runs, RngSeed seed, unsigned workers) {
    return [=](const DemandScenario& scenario, double demand_factor) {
        const auto salt = static_cast<std::uint64_t>(std::llround(demand_factor * 1e6));
        return forecast_demand(scenario, n_runs, seed.derive(salt), AvailabilityPolicy::IndependentClassDemand,
                               workers);
    };
}

std::vector<RevenueRow> revenue_comparison(const DemandScenario& base, const std::vector<double>& demand_factors,
                                           const std::vector<Heuristic>& heuristics, int n_reps, RngSeed seed,
                                           const ForecastProvider& forecasts, unsigned workers) {
    if (n_reps < 1) throw std::invalid_argument("need at least one replication");
    std::vector<RevenueRow> rows;
    for (std::size_t f = 0; f < demand_factors.size(); ++f) {
        const double fd = demand_factors[f];
        const DemandScenario scenario = scale_to_demand_factor(base, fd);
        const auto fares = scenario.fare_structure.fares();
        const int C = scenario.fare_structure.capacity;

        std::vector<Heuristic> policies{Heuristic::FCFS};
        for (Heuristic h : heuristics) {
            if (h != Heuristic::FCFS) policies.push_back(h);
        }
        std::vector<BookingControls> controls;
        std::optional<ForecastSet> forecast;
        for (Heuristic h : policies) {
            if (h == Heuristic::FCFS) {
                controls.push_back(fcfs(fares.size(), C));
            } else {
                if (!forecast) forecast = forecasts(scenario, fd);
                controls.push_back(compute_controls(h, *forecast, fares, C));
            }
        }

        std::vector<std::vector<double>> revenue(policies.size(), std::vector<double>(static_cast<std::size_t>(n_reps)));
        std::vector<std::vector<double>> bookings(policies.size(), std::vector<double>(static_cast<std::size_t>(n_reps)));
        parallel_for(static_cast<std::size_t>(n_reps), workers, [&](std::size_t r) {
            const RequestStream stream = sample_requests(scenario, seed.derive(f, r));
            for (std::size_t p = 0; p < policies.size(); ++p) {
                const BookingPattern pat = run_horizon(stream, controls[p], scenario.fare_structure, scenario.n_intervals);
                revenue[p][r] = pat.final_revenue();
                bookings[p][r] = pat.total_cumulative.back();
            }
        });

        double fcfs_mean = 0.0;
        for (std::size_t p = 0; p < policies.size(); ++p) {
            RevenueRow row;
            row.demand_factor = fd;
            row.heuristic = policies[p];
            double s = 0.0, ss = 0.0, b = 0.0;
            for (std::size_t r = 0; r < revenue[p].size(); ++r) {
                s += revenue[p][r];
                ss += revenue[p][r] * revenue[p][r];
                b += bookings[p][r];
            }
            const double n = n_reps;
            row.mean_revenue = s / n;
            row.sd_revenue = n > 1 ? std::sqrt(std::max(0.0, (ss - s * s / n) / (n - 1))) : 0.0;
            row.mean_bookings = b / n;
            if (policies[p] == Heuristic::FCFS) fcfs_mean = row.mean_revenue;
            row.ratio_vs_fcfs = fcfs_mean > 0.0 ? row.mean_revenue / fcfs_mean : 0.0;
            row.controls = controls[p];
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace rmsim
