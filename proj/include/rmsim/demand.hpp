#pragma once

#include <iosfwd>
#include <vector>

#include "rmsim/model.hpp"

namespace rmsim {

inline constexpr int kNoBuy = -1;

struct Request {
    double time = 0.0;   ///< in [0, 1]
    int segment = 0;     ///< 0-based segment index
    int wtp_class = 0;   ///< 0-based most expensive acceptable class, or kNoBuy
};

struct RequestStream {
    std::vector<Request> requests;  ///< sorted by time
};

/// Draws one horizon: d ~ Gamma(alpha, rate beta), N_i ~ Poisson(d phi_i),
/// times iid Beta(a_i, b_i), wtp class from (p_i1..p_iJ, p_i0).
RequestStream sample_requests(const DemandScenario& s, RngSeed seed);

/// Debug dump with columns time,segment,wtp_class (1-based class, 0 = no-buy).
void write_requests_csv(std::ostream& os, const RequestStream& stream);

/// Mean scales by (1+pct) with sd unchanged: alpha' = alpha (1+pct)^2, beta' = beta (1+pct).
DemandScenario make_volume_outlier(const DemandScenario& base, double pct);
DemandScenario make_wtp_outlier(const DemandScenario& base, const std::vector<double>& new_shares);
/// Replaces (a1, b1, a2, b2) with the arrival-time setting 1..4.
DemandScenario make_arrival_outlier(const DemandScenario& base, int setting);

/// Regular scenario rescaled so that mean demand / capacity equals f_D.
DemandScenario scale_to_demand_factor(const DemandScenario& base, double demand_factor);

/// Serializable description of one outlier kind used when building collections.
struct OutlierSpec {
    OutlierKind kind = OutlierKind::Volume;
    double pct = 0.0;                 ///< volume
    std::vector<double> shares;       ///< willingness-to-pay
    int setting = 1;                  ///< arrival time

    DemandScenario apply(const DemandScenario& base) const;
    std::string name() const;

    static OutlierSpec volume(double pct) { return {OutlierKind::Volume, pct, {}, 1}; }
    static OutlierSpec wtp(std::vector<double> shares) { return {OutlierKind::WillingnessToPay, 0.0, std::move(shares), 1}; }
    static OutlierSpec arrival(int setting) { return {OutlierKind::ArrivalTime, 0.0, {}, setting}; }
};

nlohmann::json to_json(const OutlierSpec& o);
OutlierSpec outlier_spec_from_json(const nlohmann::json& j);

}  // namespace rmsim
