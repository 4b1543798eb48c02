#include "rmsim/model.hpp"

#include <cmath>
#include <stdexcept>

#include "rmsim/errors.hpp"

namespace rmsim {

std::vector<double> FareStructure::fares() const {
    std::vector<double> out;
    out.reserve(classes.size());
    for (const auto& c : classes) out.push_back(c.fare);
    return out;
}

void FareStructure::validate() const {
    if (classes.size() < 2) throw std::invalid_argument("fare structure needs at least 2 classes");
    if (capacity <= 0) throw std::invalid_argument("capacity must be positive");
    for (std::size_t j = 1; j < classes.size(); ++j) {
        if (classes[j].fare > classes[j - 1].fare)
            throw std::invalid_argument("fares must be ordered descending");
    }
    if (!(classes.front().fare > classes.back().fare))
        throw std::invalid_argument("first fare must exceed last fare");
}

void CustomerSegment::validate(std::size_t n_classes) const {
    if (!(beta_a > 0.0) || !(beta_b > 0.0)) throw std::invalid_argument("Beta shapes must be positive");
    if (mix_share < 0.0 || mix_share > 1.0) throw std::invalid_argument("mix share outside [0,1]");
    if (wtp.size() != n_classes) throw std::invalid_argument("wtp length differs from number of fare classes");
    double total = no_buy;
    if (no_buy < 0.0 || no_buy > 1.0) throw std::invalid_argument("no-buy probability outside [0,1]");
    for (double p : wtp) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("wtp probability outside [0,1]");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("wtp probabilities plus no-buy must sum to 1");
}

std::string to_string(OutlierKind kind) {
    switch (kind) {
        case OutlierKind::Volume: return "volume";
        case OutlierKind::WillingnessToPay: return "wtp";
        case OutlierKind::ArrivalTime: return "arrival";
    }
    return "unknown";
}

OutlierKind outlier_kind_from_string(const std::string& s) {
    if (s == "volume") return OutlierKind::Volume;
    if (s == "wtp") return OutlierKind::WillingnessToPay;
    if (s == "arrival") return OutlierKind::ArrivalTime;
    throw std::invalid_argument("unknown outlier kind: " + s);
}

std::optional<bool> late_arrival_ordering(const DemandScenario& s) {
    if (s.segments.size() < 2) return std::nullopt;
    const auto& s1 = s.segments[0];
    const auto& s2 = s.segments[1];
    const double d1 = s1.beta_a + s1.beta_b - 2.0;
    const double d2 = s2.beta_a + s2.beta_b - 2.0;
    if (d1 <= 0.0 || d2 <= 0.0) return std::nullopt;
    return (s1.beta_a - 1.0) / d1 > (s2.beta_a - 1.0) / d2;
}

void DemandScenario::validate() const {
    if (!(gamma_shape > 0.0) || !(gamma_rate > 0.0)) throw std::invalid_argument("Gamma parameters must be positive");
    if (n_intervals < 2) throw std::invalid_argument("need at least 2 booking intervals");
    fare_structure.validate();
    if (segments.empty()) throw std::invalid_argument("scenario has no customer segments");
    double share = 0.0;
    for (const auto& seg : segments) {
        seg.validate(fare_structure.size());
        share += seg.mix_share;
    }
    if (std::abs(share - 1.0) > 1e-9) throw std::invalid_argument("mix shares must sum to 1");
    if (!label.is_outlier()) {
        auto ordering = late_arrival_ordering(*this);
        if (ordering && !*ordering)
            throw std::invalid_argument("regular scenario must have the high-value segment arriving later");
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngSeed RngSeed::derive(std::uint64_t index) const {
    return RngSeed{splitmix64(value ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

DemandScenario default_regular_scenario() {
    DemandScenario s;
    s.gamma_shape = 240.0;
    s.gamma_rate = 1.0;
    s.n_intervals = 30;
    s.fare_structure.capacity = 200;
    s.fare_structure.classes = {{"A", 400}, {"O", 300}, {"J", 280}, {"P", 240},
                                {"R", 200}, {"S", 185}, {"M", 175}};
    CustomerSegment business{5.0, 2.0, 0.5, {0.35, 0.1, 0.25, 0.15, 0.05, 0.0, 0.0}, 0.0};
    CustomerSegment leisure{2.0, 5.0, 0.5, {0.05, 0.1, 0.0, 0.05, 0.1, 0.15, 0.5}, 0.0};
    for (auto* seg : {&business, &leisure}) {
        double sum = 0.0;
        for (double p : seg->wtp) sum += p;
        seg->no_buy = 1.0 - sum;
    }
    s.segments = {business, leisure};
    s.label = Label::regular();
    return s;
}

Moments demand_moments(const DemandScenario& s) {
    return {s.gamma_shape / s.gamma_rate, std::sqrt(s.gamma_shape) / s.gamma_rate};
}

nlohmann::json to_json(const DemandScenario& s) {
    nlohmann::json j;
    j["gamma_shape"] = s.gamma_shape;
    j["gamma_rate"] = s.gamma_rate;
    j["n_intervals"] = s.n_intervals;
    j["capacity"] = s.fare_structure.capacity;
    j["fare_classes"] = nlohmann::json::array();
    for (const auto& c : s.fare_structure.classes) j["fare_classes"].push_back({{"label", c.label}, {"fare", c.fare}});
    j["segments"] = nlohmann::json::array();
    for (const auto& seg : s.segments) {
        j["segments"].push_back({{"beta_a", seg.beta_a},
                                 {"beta_b", seg.beta_b},
                                 {"mix_share", seg.mix_share},
                                 {"wtp", seg.wtp},
                                 {"no_buy", seg.no_buy}});
    }
    j["label"] = {{"name", s.label.name},
                  {"outlier_kind", s.label.kind ? nlohmann::json(to_string(*s.label.kind)) : nlohmann::json(nullptr)}};
    return j;
}

namespace {

const nlohmann::json& require(const nlohmann::json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError("missing config key: " + path + key);
    return j.at(key);
}

template <typename T>
T read(const nlohmann::json& j, const std::string& key, const std::string& path) {
    const auto& v = require(j, key, path);
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("invalid value for config key: " + path + key);
    }
}

}  // namespace

DemandScenario scenario_from_json(const nlohmann::json& j) {
    DemandScenario s;
    s.gamma_shape = read<double>(j, "gamma_shape", "");
    s.gamma_rate = read<double>(j, "gamma_rate", "");
    s.n_intervals = read<int>(j, "n_intervals", "");
    s.fare_structure.capacity = read<int>(j, "capacity", "");
    const auto& classes = require(j, "fare_classes", "");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const std::string path = "fare_classes[" + std::to_string(i) + "].";
        s.fare_structure.classes.push_back({read<std::string>(classes[i], "label", path),
                                            read<double>(classes[i], "fare", path)});
    }
    const auto& segs = require(j, "segments", "");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string path = "segments[" + std::to_string(i) + "].";
        CustomerSegment seg;
        seg.beta_a = read<double>(segs[i], "beta_a", path);
        seg.beta_b = read<double>(segs[i], "beta_b", path);
        seg.mix_share = read<double>(segs[i], "mix_share", path);
        seg.wtp = read<std::vector<double>>(segs[i], "wtp", path);
        seg.no_buy = read<double>(segs[i], "no_buy", path);
        s.segments.push_back(seg);
    }
    if (j.contains("label")) {
        const auto& lab = j.at("label");
        s.label.name = read<std::string>(lab, "name", "label.");
        if (lab.contains("outlier_kind") && !lab.at("outlier_kind").is_null()) {
            try {
                s.label.kind = outlier_kind_from_string(lab.at("outlier_kind").get<std::string>());
            } catch (const std::exception&) {
                throw ConfigError("invalid value for config key: label.outlier_kind");
            }
        }
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid scenario: ") + e.what());
    }
    return s;
}

}  // namespace rmsim
