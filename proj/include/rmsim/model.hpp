#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rmsim {

struct FareClass {
    std::string label;
    double fare = 0.0;
};

/// Fare classes ordered most expensive first, plus the seat capacity.
struct FareStructure {
    std::vector<FareClass> classes;
    int capacity = 0;

    std::size_t size() const { return classes.size(); }
    std::vector<double> fares() const;
    /// @throws std::invalid_argument on fewer than 2 classes, non-descending fares or C <= 0.
    void validate() const;
};

/// One customer type: Beta arrival-time shape, share of total demand and
/// willingness-to-pay distribution over fare classes (index 0 = class 1).
struct CustomerSegment {
    double beta_a = 1.0;
    double beta_b = 1.0;
    double mix_share = 0.0;
    std::vector<double> wtp;
    double no_buy = 0.0;

    void validate(std::size_t n_classes) const;
};

enum class OutlierKind { Volume, WillingnessToPay, ArrivalTime };

std::string to_string(OutlierKind kind);
OutlierKind outlier_kind_from_string(const std::string& s);

/// Ground-truth label of a scenario or pattern. An empty kind means regular.
struct Label {
    std::optional<OutlierKind> kind;
    std::string name = "regular";

    bool is_outlier() const { return kind.has_value(); }
    static Label regular() { return {}; }
    static Label outlier(OutlierKind k, std::string n) { return {k, std::move(n)}; }
};

struct DemandScenario {
    double gamma_shape = 1.0;  ///< alpha
    double gamma_rate = 1.0;   ///< beta (rate parameterization, mean alpha/beta)
    std::vector<CustomerSegment> segments;
    FareStructure fare_structure;
    int n_intervals = 30;
    Label label;

    /// @throws std::invalid_argument when any invariant is violated.
    void validate() const;
};

/// Whether (a1-1)/(a1+b1-2) > (a2-1)/(a2+b2-2), i.e. segment 1 peaks later.
/// Returns nullopt when a Beta mode is undefined (a+b <= 2) or there are fewer than 2 segments.
std::optional<bool> late_arrival_ordering(const DemandScenario& s);

/// Cumulative bookings of one horizon sampled at the T interval boundaries.
struct BookingPattern {
    std::vector<std::vector<int>> per_class_cumulative;  ///< [t][j]
    std::vector<int> total_cumulative;
    std::vector<double> revenue_cumulative;
    Label truth;
    std::string scenario_id;

    int n_intervals() const { return static_cast<int>(total_cumulative.size()); }
    double final_revenue() const { return revenue_cumulative.empty() ? 0.0 : revenue_cumulative.back(); }
};

/// Seed for every stochastic operation. Sub-streams are derived with
/// splitmix64 so results do not depend on scheduling order.
struct RngSeed {
    std::uint64_t value = 0;

    /// Seed for sub-stream `index`: splitmix64(value ^ splitmix64(index + 0x9e37...)).
    RngSeed derive(std::uint64_t index) const;
    RngSeed derive(std::uint64_t a, std::uint64_t b) const { return derive(a).derive(b); }
};

std::uint64_t splitmix64(std::uint64_t x);

DemandScenario default_regular_scenario();

struct Moments {
    double mean;
    double sd;
};
Moments demand_moments(const DemandScenario& s);

nlohmann::json to_json(const DemandScenario& s);
/// @throws ConfigError naming the first missing or invalid key.
DemandScenario scenario_from_json(const nlohmann::json& j);

}  // namespace rmsim
