#include "rmsim/demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rmsim/errors.hpp"

namespace rmsim {

namespace {

double sample_beta(std::mt19937_64& rng, double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
}

}  // namespace

RequestStream sample_requests(const DemandScenario& s, RngSeed seed) {
    s.validate();
    std::mt19937_64 rng(seed.value);
    std::gamma_distribution<double> total(s.gamma_shape, 1.0 / s.gamma_rate);
    const double d = total(rng);

    RequestStream out;
    for (std::size_t i = 0; i < s.segments.size(); ++i) {
        const auto& seg = s.segments[i];
        const double rate = d * seg.mix_share;
        if (rate <= 0.0) continue;
        std::poisson_distribution<long> count(rate);
        const long n = count(rng);
        std::vector<double> probs(seg.wtp);
        probs.push_back(seg.no_buy);
        std::discrete_distribution<int> choice(probs.begin(), probs.end());
        const int no_buy_index = static_cast<int>(seg.wtp.size());
        for (long r = 0; r < n; ++r) {
            Request req;
            req.time = sample_beta(rng, seg.beta_a, seg.beta_b);
            req.segment = static_cast<int>(i);
            const int k = choice(rng);
            req.wtp_class = k == no_buy_index ? kNoBuy : k;
            out.requests.push_back(req);
        }
    }
    std::stable_sort(out.requests.begin(), out.requests.end(),
                     [](const Request& a, const Request& b) { return a.time < b.time; });
    return out;
}

void write_requests_csv(std::ostream& os, const RequestStream& stream) {
    os << "time,segment,wtp_class\n";
    char buf[64];
    for (const auto& r : stream.requests) {
        std::snprintf(buf, sizeof buf, "%.10f", r.time);
        os << buf << ',' << r.segment + 1 << ',' << (r.wtp_class == kNoBuy ? 0 : r.wtp_class + 1) << '\n';
    }
}

namespace {

std::string pct_name(double pct) {
    std::ostringstream os;
    os << (pct >= 0 ? "+" : "") << pct * 100.0 << "%";
    return os.str();
}

}  // namespace

DemandScenario make_volume_outlier(const DemandScenario& base, double pct) {
    if (!(pct > -1.0)) throw std::invalid_argument("volume outlier pct must exceed -1");
    DemandScenario s = base;
    s.gamma_shape = base.gamma_shape * (1.0 + pct) * (1.0 + pct);
    s.gamma_rate = base.gamma_rate * (1.0 + pct);
    if (pct != 0.0) s.label = Label::outlier(OutlierKind::Volume, "volume" + pct_name(pct));
    return s;
}

DemandScenario make_wtp_outlier(const DemandScenario& base, const std::vector<double>& new_shares) {
    if (new_shares.size() != base.segments.size())
        throw std::invalid_argument("share vector length differs from number of segments");
    double sum = 0.0;
    bool changed = false;
    for (std::size_t i = 0; i < new_shares.size(); ++i) {
        if (new_shares[i] < 0.0 || new_shares[i] > 1.0) throw std::invalid_argument("share outside [0,1]");
        sum += new_shares[i];
        changed = changed || new_shares[i] != base.segments[i].mix_share;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("shares must sum to 1");
    DemandScenario s = base;
    for (std::size_t i = 0; i < new_shares.size(); ++i) s.segments[i].mix_share = new_shares[i];
    if (changed) {
        std::ostringstream os;
        os << "wtp";
        for (double v : new_shares) os << ':' << v;
        s.label = Label::outlier(OutlierKind::WillingnessToPay, os.str());
    }
    return s;
}

DemandScenario make_arrival_outlier(const DemandScenario& base, int setting) {
    static const double table[4][4] = {{5, 2, 5, 2}, {2, 5, 2, 5}, {5, 2, 2, 2}, {2, 2, 2, 5}};
    if (setting < 1 || setting > 4) throw std::invalid_argument("arrival setting must be 1..4");
    if (base.segments.size() != 2) throw std::invalid_argument("arrival outliers need exactly 2 segments");
    DemandScenario s = base;
    const auto& row = table[setting - 1];
    s.segments[0].beta_a = row[0];
    s.segments[0].beta_b = row[1];
    s.segments[1].beta_a = row[2];
    s.segments[1].beta_b = row[3];
    s.label = Label::outlier(OutlierKind::ArrivalTime, "arrival:" + std::to_string(setting));
    return s;
}

DemandScenario scale_to_demand_factor(const DemandScenario& base, double demand_factor) {
    if (!(demand_factor > 0.0)) throw std::invalid_argument("demand factor must be positive");
    const double target = demand_factor * base.fare_structure.capacity;
    DemandScenario s = make_volume_outlier(base, target / demand_moments(base).mean - 1.0);
    s.label = base.label;
    return s;
}

DemandScenario OutlierSpec::apply(const DemandScenario& base) const {
    switch (kind) {
        case OutlierKind::Volume: return make_volume_outlier(base, pct);
        case OutlierKind::WillingnessToPay: return make_wtp_outlier(base, shares);
        case OutlierKind::ArrivalTime: return make_arrival_outlier(base, setting);
    }
    throw std::logic_error("unhandled outlier kind");
}

std::string OutlierSpec::name() const {
    switch (kind) {
        case OutlierKind::Volume: return "volume" + pct_name(pct);
        case OutlierKind::WillingnessToPay: {
            std::ostringstream os;
            os << "wtp";
            for (double v : shares) os << ':' << v;
            return os.str();
        }
        case OutlierKind::ArrivalTime: return "arrival:" + std::to_string(setting);
    }
    return "unknown";
}

nlohmann::json to_json(const OutlierSpec& o) {
    nlohmann::json j{{"kind", to_string(o.kind)}};
    switch (o.kind) {
        case OutlierKind::Volume: j["pct"] = o.pct; break;
        case OutlierKind::WillingnessToPay: j["shares"] = o.shares; break;
        case OutlierKind::ArrivalTime: j["setting"] = o.setting; break;
    }
    return j;
}

OutlierSpec outlier_spec_from_json(const nlohmann::json& j) {
    if (!j.contains("kind")) throw ConfigError("missing config key: outliers[].kind");
    OutlierSpec o;
    try {
        o.kind = outlier_kind_from_string(j.at("kind").get<std::string>());
    } catch (const std::exception&) {
        throw ConfigError("invalid value for config key: outliers[].kind");
    }
    const char* key = o.kind == OutlierKind::Volume ? "pct" : o.kind == OutlierKind::WillingnessToPay ? "shares" : "setting";
    if (!j.contains(key)) throw ConfigError(std::string("missing config key: outliers[].") + key);
    try {
        if (o.kind == OutlierKind::Volume) o.pct = j.at(key).get<double>();
        else if (o.kind == OutlierKind::WillingnessToPay) o.shares = j.at(key).get<std::vector<double>>();
        else o.setting = j.at(key).get<int>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("invalid value for config key: outliers[].") + key);
    }
    return o;
}

}  // namespace rmsim
