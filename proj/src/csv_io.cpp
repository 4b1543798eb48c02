#include "rmsim/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "rmsim/errors.hpp"

namespace rmsim::csv {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    auto push = [&] {
        const auto b = cur.find_first_not_of(" \t\r");
        const auto e = cur.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
        cur.clear();
    };
    for (char ch : line) {
        if (ch == ',') push();
        else cur.push_back(ch);
    }
    push();
    return out;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("NA"); }

void write_patterns(std::ostream& os, const Collection& c) {
    os << "pattern_id,interval_index,cumulative_bookings,truth_label,kind\n";
    for (std::size_t n = 0; n < c.patterns.size(); ++n) {
        const auto& p = c.patterns[n];
        const std::string truth = p.truth.is_outlier() ? "outlier" : "regular";
        for (std::size_t t = 0; t < p.total_cumulative.size(); ++t)
            os << n << ',' << t + 1 << ',' << p.total_cumulative[t] << ',' << truth << ',' << p.truth.name << '\n';
    }
}

void write_pattern_classes(std::ostream& os, const Collection& c, const FareStructure& fares) {
    os << "pattern_id,interval_index,class_label,cumulative_bookings,cumulative_revenue\n";
    for (std::size_t n = 0; n < c.patterns.size(); ++n) {
        const auto& p = c.patterns[n];
        for (std::size_t t = 0; t < p.per_class_cumulative.size(); ++t) {
            for (std::size_t j = 0; j < p.per_class_cumulative[t].size(); ++j) {
                const int b = p.per_class_cumulative[t][j];
                os << n << ',' << t + 1 << ',' << fares.classes.at(j).label << ',' << b << ','
                   << fmt(b * fares.classes.at(j).fare) << '\n';
            }
        }
    }
}

Collection read_patterns(std::istream& in, int capacity) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("pattern file is empty");
    const auto header = split(line);
    const std::vector<std::string> expected{"pattern_id", "interval_index", "cumulative_bookings", "truth_label", "kind"};
    if (header != expected)
        throw DataError("pattern file header must be pattern_id,interval_index,cumulative_bookings,truth_label,kind");
    std::map<long, std::map<int, int>> values;
    std::map<long, std::pair<std::string, std::string>> labels;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto f = split(line);
        if (f.size() != 5) throw DataError("row " + std::to_string(row) + ": expected 5 fields");
        try {
            const long id = std::stol(f[0]);
            const int t = std::stoi(f[1]);
            const int v = std::stoi(f[2]);
            if (!values[id].emplace(t, v).second)
                throw DataError("duplicate row for pattern " + f[0] + " interval " + f[1]);
            labels[id] = {f[3], f[4]};
        } catch (const std::logic_error&) {
            throw DataError("row " + std::to_string(row) + ": non-numeric field");
        }
    }
    Collection c;
    c.capacity = capacity;
    for (const auto& [id, series] : values) {
        BookingPattern p;
        int expect = 1;
        for (const auto& [t, v] : series) {
            if (t != expect++) throw DataError("pattern " + std::to_string(id) + " has a gap in interval_index");
            p.total_cumulative.push_back(v);
        }
        if (c.n_intervals == 0) c.n_intervals = static_cast<int>(p.total_cumulative.size());
        if (p.n_intervals() != c.n_intervals) throw DataError("pattern " + std::to_string(id) + " has a different length");
        const auto& [truth, kind] = labels[id];
        if (truth == "outlier") {
            const OutlierKind k = kind.rfind("wtp", 0) == 0       ? OutlierKind::WillingnessToPay
                                  : kind.rfind("arrival", 0) == 0 ? OutlierKind::ArrivalTime
                                                                  : OutlierKind::Volume;
            p.truth = Label::outlier(k, kind);
        }
        else if (truth == "regular") p.truth = Label::regular();
        else throw DataError("pattern " + std::to_string(id) + ": truth_label must be regular or outlier");
        p.truth.name = kind;
        p.scenario_id = kind;
        c.patterns.push_back(std::move(p));
    }
    if (c.patterns.empty()) throw DataError("pattern file has no rows");
    return c;
}

void write_flags(std::ostream& os, const DetectionRun& run) {
    os << "method,pattern_id,interval_index,score,flagged\n";
    for (std::size_t k = 0; k < run.taus.size(); ++k) {
        const auto& d = run.per_interval[k];
        for (std::size_t n = 0; n < d.flags.size(); ++n)
            os << run.method << ',' << n << ',' << run.taus[k] << ',' << fmt(d.scores[n]) << ',' << (d.flags[n] ? 1 : 0)
               << '\n';
    }
}

void write_depths(std::ostream& os, const FunctionalResult& r, int tau) {
    os << "pattern_id,interval_count_used,depth,threshold,flagged,iteration_flagged\n";
    for (std::size_t n = 0; n < r.depth.size(); ++n)
        os << n << ',' << tau << ',' << fmt(r.depth[n]) << ',' << fmt(r.threshold) << ','
           << (r.iteration_flagged[n] > 0 ? 1 : 0) << ',' << r.iteration_flagged[n] << '\n';
}

void write_completions(std::ostream& os, const std::vector<CompletedPattern>& completed) {
    os << "pattern_id,interval_index,value,is_extrapolated,method,fitted_orders\n";
    for (std::size_t n = 0; n < completed.size(); ++n) {
        const auto& c = completed[n];
        const auto full = c.full();
        for (std::size_t t = 0; t < full.size(); ++t)
            os << n << ',' << t + 1 << ',' << fmt(full[t]) << ',' << (t >= c.observed_prefix.size() ? 1 : 0) << ','
               << to_string(c.method) << ',' << c.model_summary << '\n';
    }
}

void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "detector,interval,tpr,fpr,bcr,lr_plus\n";
    for (const auto& r : rows)
        os << r.detector << ',' << r.tau << ',' << fmt(r.tpr) << ',' << fmt(r.fpr) << ',' << fmt(r.bcr) << ','
           << fmt(r.lr_plus) << '\n';
}

void write_roc(std::ostream& os, const std::string& detector, int tau, const RocCurve& roc) {
    for (const auto& p : roc.points)
        os << detector << ',' << tau << ',' << fmt(p.threshold) << ',' << fmt(p.fpr) << ',' << fmt(p.tpr) << '\n';
}

void write_revenue_gain(std::ostream& os, const std::vector<RevenueGainRow>& rows) {
    os << "heuristic,f_D,magnitude,correction_interval,pct_revenue_change,ci_low,ci_high\n";
    for (const auto& r : rows)
        os << to_string(r.heuristic) << ',' << fmt(r.demand_factor) << ',' << fmt(r.magnitude) << ','
           << r.correction_interval << ',' << fmt(r.pct_change) << ',' << fmt(r.ci_low) << ',' << fmt(r.ci_high)
           << '\n';
}

}  // namespace rmsim::csv
