#include "rmsim/controls.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "rmsim/stats.hpp"

namespace rmsim {

std::string to_string(Heuristic h) {
    switch (h) {
        case Heuristic::EMSRb: return "emsrb";
        case Heuristic::EMSRbMR: return "emsrb_mr";
        case Heuristic::FCFS: return "fcfs";
    }
    return "unknown";
}

Heuristic heuristic_from_string(const std::string& s) {
    if (s == "emsrb") return Heuristic::EMSRb;
    if (s == "emsrb_mr") return Heuristic::EMSRbMR;
    if (s == "fcfs") return Heuristic::FCFS;
    throw std::invalid_argument("unknown heuristic: " + s + " (valid: emsrb, emsrb_mr, fcfs)");
}

namespace {

void check_inputs(const std::vector<double>& mu, const std::vector<double>& var, const std::vector<double>& fares,
                  int capacity) {
    if (mu.empty() || mu.size() != var.size() || mu.size() != fares.size())
        throw std::invalid_argument("mu, var and fares must be non-empty and of equal length");
    if (capacity < 0) throw std::invalid_argument("capacity must be non-negative");
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (var[j] < 0.0) throw std::invalid_argument("variance must be non-negative");
        if (mu[j] < 0.0) throw std::invalid_argument("mean demand must be non-negative");
        if (j > 0 && fares[j] > fares[j - 1]) throw std::invalid_argument("fares must be ordered descending");
    }
}

// Shared protection-level loop. `skip[j]` carries PL_{j-1} forward and
// `close_below[j]` protects the whole capacity for classes 1..j.
BookingControls nested_emsr(const std::vector<double>& mu, const std::vector<double>& var,
                            const std::vector<double>& fares, int capacity, const std::vector<bool>& skip,
                            const std::vector<bool>& close_below, Heuristic h) {
    const std::size_t J = mu.size();
    const double C = capacity;
    BookingControls out;
    out.heuristic = h;
    out.capacity = capacity;
    out.raw_protection.assign(J, C);

    double prev = 0.0;
    double sum_mu = 0.0, sum_var = 0.0, sum_rev = 0.0;
    for (std::size_t j = 0; j + 1 < J; ++j) {
        sum_mu += mu[j];
        sum_var += var[j];
        sum_rev += fares[j] * mu[j];
        double pl;
        if (skip[j] || sum_mu <= 0.0) {
            pl = prev;
        } else if (close_below[j]) {
            pl = C;
        } else {
            const double p = 1.0 - fares[j + 1] / (sum_rev / sum_mu);
            if (p <= 0.0) pl = 0.0;
            else if (p >= 1.0) pl = C;
            else pl = sum_mu + stats::normal_quantile(p) * std::sqrt(sum_var);
        }
        pl = std::clamp(pl, 0.0, C);
        pl = std::max(pl, prev);
        out.raw_protection[j] = pl;
        prev = pl;
    }

    out.protection.resize(J);
    for (std::size_t j = 0; j < J; ++j) out.protection[j] = static_cast<int>(std::lround(out.raw_protection[j]));
    out.limits.resize(J);
    out.limits[0] = capacity;
    for (std::size_t j = 1; j < J; ++j) out.limits[j] = capacity - out.protection[j - 1];
    return out;
}

}  // namespace

BookingControls emsrb(const std::vector<double>& mu, const std::vector<double>& var, const std::vector<double>& fares,
                      int capacity) {
    check_inputs(mu, var, fares, capacity);
    const std::vector<bool> none(mu.size(), false);
    return nested_emsr(mu, var, fares, capacity, none, none, Heuristic::EMSRb);
}

MarginalTransform marginal_revenue_transform(const std::vector<double>& mu_cum, const std::vector<double>& fares) {
    if (mu_cum.empty() || mu_cum.size() != fares.size())
        throw std::invalid_argument("mu_cum and fares must be non-empty and of equal length");
    const std::size_t J = mu_cum.size();
    MarginalTransform t;
    t.adj_mu.resize(J);
    t.adj_fares.resize(J);
    t.degenerate.assign(J, false);
    t.inefficient.assign(J, false);
    double prev_mu = 0.0, prev_rev = 0.0, prev_fare = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        if (mu_cum[j] < prev_mu) throw std::invalid_argument("cumulative demand must be non-decreasing");
        const double inc = mu_cum[j] - prev_mu;
        const double rev = fares[j] * mu_cum[j];
        t.adj_mu[j] = inc;
        if (inc <= 0.0) {
            t.degenerate[j] = true;
            t.inefficient[j] = true;
            t.adj_fares[j] = j == 0 ? fares[0] : prev_fare;
        } else {
            t.adj_fares[j] = (rev - prev_rev) / inc;
            t.inefficient[j] = t.adj_fares[j] < 0.0;
        }
        prev_fare = t.adj_fares[j];
        prev_mu = mu_cum[j];
        prev_rev = rev;
    }
    return t;
}

std::vector<double> sellup_cumulative_demand(double mu_n, const std::vector<double>& psup) {
    std::vector<double> out;
    out.reserve(psup.size());
    for (double p : psup) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("sell-up probability outside [0,1]");
        out.push_back(mu_n * p);
    }
    return out;
}

BookingControls emsrb_mr(const ForecastSet& forecast, const std::vector<double>& fares, int capacity) {
    check_inputs(forecast.mu, forecast.var, fares, capacity);
    const std::size_t J = forecast.size();
    std::vector<double> mu_cum(J), inc_var(J);
    if (forecast.basis == AvailabilityPolicy::IndependentClassDemand) {
        double acc = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            acc += forecast.mu[j];
            mu_cum[j] = acc;
            inc_var[j] = forecast.var[j];
        }
    } else {
        // Increment variances are approximated by differences of cumulative variances.
        for (std::size_t j = 0; j < J; ++j) {
            mu_cum[j] = j == 0 ? forecast.mu[0] : std::max(forecast.mu[j], mu_cum[j - 1]);
            inc_var[j] = j == 0 ? forecast.var[0] : std::max(forecast.var[j] - forecast.var[j - 1], 0.0);
        }
    }
    const MarginalTransform t = marginal_revenue_transform(mu_cum, fares);

    std::vector<double> weight_fares(J);
    for (std::size_t j = 0; j < J; ++j) weight_fares[j] = std::abs(t.adj_fares[j]);
    std::vector<bool> close_below(J, false);
    for (std::size_t j = 0; j + 1 < J; ++j) close_below[j] = t.degenerate[j + 1] && mu_cum[j] > 0.0;
    return nested_emsr(t.adj_mu, inc_var, weight_fares, capacity, t.inefficient, close_below, Heuristic::EMSRbMR);
}

BookingControls fcfs(std::size_t n_classes, int capacity) {
    if (n_classes == 0) throw std::invalid_argument("need at least one class");
    BookingControls out;
    out.heuristic = Heuristic::FCFS;
    out.capacity = capacity;
    out.limits.assign(n_classes, capacity);
    out.protection.assign(n_classes, 0);
    out.raw_protection.assign(n_classes, 0.0);
    out.protection.back() = capacity;
    out.raw_protection.back() = capacity;
    return out;
}

BookingControls compute_controls(Heuristic h, const ForecastSet& forecast, const std::vector<double>& fares,
                                 int capacity) {
    switch (h) {
        case Heuristic::EMSRb:
            if (forecast.basis != AvailabilityPolicy::IndependentClassDemand)
                throw std::invalid_argument("EMSRb needs per-class demand forecasts");
            return emsrb(forecast.mu, forecast.var, fares, capacity);
        case Heuristic::EMSRbMR: return emsrb_mr(forecast, fares, capacity);
        case Heuristic::FCFS: return fcfs(fares.size(), capacity);
    }
    throw std::logic_error("unhandled heuristic");
}

std::vector<double> arrived_fraction_by_class(const DemandScenario& s, double t) {
    const std::size_t J = s.fare_structure.size();
    std::vector<double> num(J, 0.0), den(J, 0.0);
    t = std::clamp(t, 0.0, 1.0);
    for (const auto& seg : s.segments) {
        const double F = t <= 0.0 ? 0.0 : t >= 1.0 ? 1.0 : boost::math::ibeta(seg.beta_a, seg.beta_b, t);
        for (std::size_t j = 0; j < J; ++j) {
            const double w = seg.mix_share * seg.wtp[j];
            num[j] += w * F;
            den[j] += w;
        }
    }
    std::vector<double> out(J);
    for (std::size_t j = 0; j < J; ++j) out[j] = den[j] > 0.0 ? num[j] / den[j] : t;
    return out;
}

BookingControls recompute_midhorizon(const BookingControls& controls, const ForecastSet& corrected,
                                     const std::vector<double>& fares, int sold,
                                     const std::vector<double>& arrived_fraction) {
    if (sold < 0 || sold > controls.capacity) throw std::invalid_argument("sold must lie in [0, capacity]");
    if (arrived_fraction.size() != corrected.size()) throw std::invalid_argument("arrived fraction length mismatch");
    std::vector<double> mu(corrected.size()), var(corrected.size());
    for (std::size_t j = 0; j < corrected.size(); ++j) {
        const double a = arrived_fraction[j];
        if (a < 0.0 || a > 1.0) throw std::invalid_argument("arrived fraction outside [0,1]");
        mu[j] = corrected.mu[j] * (1.0 - a);
        var[j] = corrected.var[j] * (1.0 - a);
    }
    const ForecastSet remaining = ForecastSet::from_moments(std::move(mu), std::move(var), corrected.n_runs,
                                                            corrected.basis);
    return compute_controls(controls.heuristic, remaining, fares, controls.capacity - sold);
}

BookingControls recompute_midhorizon(const BookingControls& controls, const ForecastSet& corrected,
                                     const std::vector<double>& fares, int sold, double arrived_fraction) {
    return recompute_midhorizon(controls, corrected, fares, sold,
                                std::vector<double>(corrected.size(), arrived_fraction));
}

void write_controls_csv(std::ostream& os, const BookingControls& c, const FareStructure& fares) {
    os << "class_label,fare,protection_level,booking_limit,heuristic\n";
    for (std::size_t j = 0; j < c.size(); ++j) {
        os << fares.classes.at(j).label << ',' << fares.classes.at(j).fare << ',' << c.protection[j] << ','
           << c.limits[j] << ',' << to_string(c.heuristic) << '\n';
    }
}

}  // namespace rmsim
