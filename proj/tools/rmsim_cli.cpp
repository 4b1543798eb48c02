#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include "rmsim/booking.hpp"
#include "rmsim/csv_io.hpp"
#include "rmsim/empirical.hpp"
#include "rmsim/errors.hpp"
#include "rmsim/evaluate.hpp"
#include "rmsim/reference_data.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rmsim;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---- config access ----------------------------------------------------------

const json& need(const json& j, const std::string& key, const std::string& path = "") {
    if (!j.is_object() || !j.contains(key)) throw ConfigError("missing config key: " + path + key);
    return j.at(key);
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& path = "") {
    try {
        return need(j, key, path).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("invalid value for config key: " + path + key);
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& path = "") {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return get<T>(j, key, path);
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
}

DemandScenario scenario_of(const json& cfg) {
    DemandScenario s = cfg.contains("scenario") && !cfg.at("scenario").is_null() ? scenario_from_json(cfg.at("scenario"))
                                                                                : default_regular_scenario();
    if (cfg.contains("demand_factor")) s = scale_to_demand_factor(s, get<double>(cfg, "demand_factor"));
    return s;
}

Heuristic heuristic_of(const json& j, const std::string& key, const std::string& path = "") {
    try {
        return heuristic_from_string(get<std::string>(j, key, path));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid value for config key: ") + path + key + ": " + e.what());
    }
}

CollectionConfig collection_of(const json& cfg) {
    const json& c = need(cfg, "collection");
    CollectionConfig out;
    out.n_patterns = get<int>(c, "n_patterns", "collection.");
    out.outlier_frequency = get<double>(c, "outlier_frequency", "collection.");
    for (const auto& o : need(c, "outliers", "collection.")) out.outlier_kinds.push_back(outlier_spec_from_json(o));
    if (out.n_patterns < 1) throw ConfigError("invalid value for config key: collection.n_patterns");
    if (out.outlier_frequency < 0.0 || out.outlier_frequency > 1.0)
        throw ConfigError("invalid value for config key: collection.outlier_frequency");
    if (out.outlier_frequency > 0.0 && out.outlier_kinds.empty())
        throw ConfigError("invalid value for config key: collection.outliers (empty with positive frequency)");
    return out;
}

FunctionalParams functional_of(const json& cfg) {
    FunctionalParams p;
    if (!cfg.contains("functional")) return p;
    const json& f = cfg.at("functional");
    p.bootstrap.replicates = get_or(f, "replicates", p.bootstrap.replicates, "functional.");
    p.bootstrap.percentile = get_or(f, "percentile", p.bootstrap.percentile, "functional.");
    p.bootstrap.gamma = get_or(f, "gamma", p.bootstrap.gamma, "functional.");
    p.bootstrap.alpha = get_or(f, "alpha", p.bootstrap.alpha, "functional.");
    p.min_patterns = get_or(f, "min_patterns", p.min_patterns, "functional.");
    return p;
}

DetectorSpec detector_of(const std::string& name, const FunctionalParams& fp) {
    DetectorSpec spec;
    try {
        spec = parse_detector(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    spec.functional = fp;
    return spec;
}

// Controls for the regular scenario, optimized from either the published
// forecast table or a Monte-Carlo forecast (control_forecast).
BookingControls controls_of(const json& cfg, const DemandScenario& s, RngSeed seed, unsigned workers) {
    const Heuristic h = heuristic_of(cfg, "heuristic");
    const std::string source = get_or<std::string>(cfg, "control_forecast", "monte_carlo");
    const int runs = get_or(cfg, "forecast_runs", 100);
    const auto fares = s.fare_structure.fares();
    if (h == Heuristic::FCFS) return fcfs(fares.size(), s.fare_structure.capacity);
    if (source == "published") {
        const double fd = demand_moments(s).mean / s.fare_structure.capacity;
        try {
            return compute_controls(h, reference::published_forecast(std::round(fd * 10.0) / 10.0), fares,
                                    s.fare_structure.capacity);
        } catch (const std::invalid_argument&) {
            throw ConfigError("invalid value for config key: control_forecast (no published table for this demand factor)");
        }
    }
    if (source != "monte_carlo") throw ConfigError("invalid value for config key: control_forecast");
    return compute_controls(h, forecast_demand(s, runs, seed, AvailabilityPolicy::IndependentClassDemand, workers), fares,
                            s.fare_structure.capacity);
}

// ---- output helpers -----------------------------------------------------------

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output directory: " + dir_.string());
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
        out << content;
        files_[name] = hex(fnv1a(content));
    }

    template <typename F>
    void write_with(const std::string& name, F&& fill) {
        std::ostringstream os;
        fill(os);
        write(name, os.str());
    }

    void manifest(const std::string& command, const json& inputs, std::uint64_t seed) {
        json m;
        m["command"] = command;
        m["config_hash"] = hex(fnv1a(inputs.dump()));
        m["inputs"] = inputs;
        m["seed"] = seed;
        m["version"] = kVersion;
        m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)},
                          {"boost", std::to_string(BOOST_VERSION / 100000) + "." +
                                        std::to_string(BOOST_VERSION / 100 % 1000) + "." + std::to_string(BOOST_VERSION % 100)},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
        m["outputs"] = files_;
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << m.dump(2) << '\n';
    }

private:
    fs::path dir_;
    std::map<std::string, std::string> files_;
};

Collection read_collection(const std::string& path, int capacity) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read pattern file: " + path);
    return csv::read_patterns(in, capacity);
}

// Concatenates CSV blocks that each carry the same header line.
void append_csv(std::string& acc, const std::string& block) {
    acc += acc.empty() ? block : block.substr(block.find('\n') + 1);
}

std::vector<int> taus_or_full(std::vector<int> taus, int T) {
    if (taus.empty()) taus.push_back(T);
    for (int t : taus) {
        if (t < 1 || t > T) throw ConfigError("--tau must lie in [1, " + std::to_string(T) + "]");
    }
    return taus;
}

// ---- subcommands --------------------------------------------------------------------

struct Common {
    std::string out;
    std::uint64_t seed = 1;
    bool seed_given = false;
    unsigned workers = 1;
};

int cmd_simulate(const std::string& config_path, const Common& c, bool dry_run) {
    const json cfg = load_config(config_path);
    const DemandScenario s = scenario_of(cfg);
    const CollectionConfig cc = collection_of(cfg);
    const Heuristic h = heuristic_of(cfg, "heuristic");
    const std::uint64_t seed = c.seed_given ? c.seed : get_or<std::uint64_t>(cfg, "seed", c.seed);
    const int runs = get_or(cfg, "forecast_runs", 100);
    if (dry_run) {
        std::cout << "config ok: " << cc.n_patterns << " patterns, heuristic " << to_string(h) << '\n';
        return 0;
    }
    const RngSeed root{seed};
    const ForecastSet f = forecast_demand(s, runs, root.derive(0), AvailabilityPolicy::IndependentClassDemand, c.workers);
    const BookingControls controls = compute_controls(h, f, s.fare_structure.fares(), s.fare_structure.capacity);
    const Collection col = build_collection(cc, s, controls, root.derive(1), c.workers);

    OutputDir out(c.out);
    out.write_with("patterns.csv", [&](std::ostream& os) { csv::write_patterns(os, col); });
    out.write_with("pattern_classes.csv", [&](std::ostream& os) { csv::write_pattern_classes(os, col, s.fare_structure); });
    out.write_with("controls.csv", [&](std::ostream& os) { write_controls_csv(os, controls, s.fare_structure); });
    out.write_with("forecast.csv", [&](std::ostream& os) { write_forecast_csv(os, f, s.fare_structure); });
    out.write("scenario.json", to_json(s).dump(2) + "\n");
    out.manifest("simulate", cfg, seed);
    std::cout << "patterns=" << col.size() << " outliers=" << col.n_outliers() << " heuristic=" << to_string(h) << '\n';
    return 0;
}

int cmd_detect(const std::string& patterns, const std::string& method, const std::string& extrap,
               const std::vector<int>& taus_in, int capacity, int replicates, const Common& c) {
    FunctionalParams fp;
    if (replicates > 0) fp.bootstrap.replicates = replicates;
    fp.bootstrap.workers = c.workers;
    DetectorSpec spec = detector_of(extrap.empty() ? method : method + "+" + extrap, fp);
    const Collection col = read_collection(patterns, capacity);
    const std::vector<int> taus = taus_or_full(taus_in, col.n_intervals);
    const RngSeed seed{c.seed};

    OutputDir out(c.out);
    DetectorSpec base = spec;
    base.extrapolation.reset();
    const auto det = make_detector(base, col.n_intervals, capacity, seed, c.workers);
    const bool depth = spec.id == "functional_depth";
    DetectionRun run;
    run.method = spec.name();
    run.taus = taus;
    std::string completions, depths;
    for (int tau : taus) {
        Eigen::MatrixXd x = col.totals(tau);
        if (spec.extrapolation) {
            const auto done = complete_collection(x, col.n_intervals, *spec.extrapolation, capacity, c.workers);
            std::ostringstream part;
            csv::write_completions(part, done);
            append_csv(completions, part.str());
            if (tau < col.n_intervals) x = to_matrix(done);
        }
        if (depth) {
            const FunctionalResult r = static_cast<const FunctionalDepthDetector&>(*det).run(x);
            std::ostringstream part;
            csv::write_depths(part, r, tau);
            append_csv(depths, part.str());
            run.per_interval.push_back(r.detection);
        } else {
            run.per_interval.push_back(det->detect(x));
        }
    }
    out.write_with("flags.csv", [&](std::ostream& os) { csv::write_flags(os, run); });
    if (spec.extrapolation) out.write("completions.csv", completions);
    if (depth) out.write("depths.csv", depths);
    const json inputs{{"patterns", fs::path(patterns).filename().string()},
                      {"method", spec.name()},
                      {"taus", taus},
                      {"capacity", capacity},
                      {"replicates", fp.bootstrap.replicates}};
    out.manifest("detect", inputs, c.seed);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const auto cc = confusion(run.per_interval[k].flags, col.truth());
        std::cout << spec.name() << " tau=" << taus[k] << " flagged=" << cc.tp + cc.fp
                  << " bcr=" << csv::fmt(bcr(cc)) << (run.per_interval[k].abstained ? " (abstained)" : "") << '\n';
    }
    return 0;
}

int cmd_extrapolate(const std::string& patterns, const std::string& method, const std::vector<int>& taus_in,
                    int capacity, const Common& c) {
    ExtrapolationMethod m;
    try {
        m = extrapolation_method_from_string(method);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const Collection col = read_collection(patterns, capacity);
    const std::vector<int> taus = taus_or_full(taus_in, col.n_intervals);
    OutputDir out(c.out);
    std::string completions;
    for (int tau : taus) {
        std::ostringstream part;
        csv::write_completions(part, complete_collection(col.totals(tau), col.n_intervals, m, capacity, c.workers));
        append_csv(completions, part.str());
    }
    out.write("completions.csv", completions);
    out.manifest("extrapolate",
                 {{"patterns", fs::path(patterns).filename().string()}, {"method", method}, {"taus", taus}, {"capacity", capacity}},
                 c.seed);
    return 0;
}

int cmd_benchmark(const std::string& config_path, const Common& c, bool dry_run) {
    const json cfg = load_config(config_path);
    const DemandScenario s = scenario_of(cfg);
    const CollectionConfig cc = collection_of(cfg);
    const FunctionalParams fp = functional_of(cfg);
    const int reps = get<int>(cfg, "replications");
    if (reps < 1) throw ConfigError("invalid value for config key: replications");
    std::vector<DetectorSpec> detectors;
    for (const auto& name : get<std::vector<std::string>>(cfg, "detectors")) detectors.push_back(detector_of(name, fp));
    if (detectors.empty()) throw ConfigError("invalid value for config key: detectors (empty detector list)");
    const auto foresight = get_or(cfg, "foresight_taus", std::vector<int>{});
    const auto roc_taus = get_or(cfg, "roc_taus", std::vector<int>{});
    const bool hindsight = get_or(cfg, "hindsight", false);
    for (int t : foresight)
        if (t < 1 || t > s.n_intervals) throw ConfigError("invalid value for config key: foresight_taus");
    for (int t : roc_taus)
        if (t < 1 || t > s.n_intervals) throw ConfigError("invalid value for config key: roc_taus");
    const std::uint64_t seed = c.seed_given ? c.seed : get_or<std::uint64_t>(cfg, "seed", c.seed);

    std::optional<json> revenue = cfg.contains("revenue_factors") ? std::optional<json>(cfg.at("revenue_factors")) : std::nullopt;
    std::optional<RevenueGainConfig> gain;
    if (cfg.contains("revenue_gain")) {
        const json& g = cfg.at("revenue_gain");
        RevenueGainConfig rg;
        rg.demand_factors = get<std::vector<double>>(g, "demand_factors", "revenue_gain.");
        rg.magnitudes = get<std::vector<double>>(g, "magnitudes", "revenue_gain.");
        rg.correction_intervals = get_or(g, "correction_intervals", rg.correction_intervals, "revenue_gain.");
        rg.heuristics.clear();
        for (const auto& h : get<std::vector<std::string>>(g, "heuristics", "revenue_gain.")) {
            try {
                rg.heuristics.push_back(heuristic_from_string(h));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("invalid value for config key: revenue_gain.heuristics: ") + e.what());
            }
        }
        rg.n_reps = get<int>(g, "n_reps", "revenue_gain.");
        rg.forecast_runs = get_or(g, "forecast_runs", rg.forecast_runs, "revenue_gain.");
        gain = rg;
    }
    if (revenue) {
        get<std::vector<double>>(*revenue, "demand_factors", "revenue_factors.");
        get<int>(*revenue, "n_reps", "revenue_factors.");
    }
    if (dry_run) {
        std::cout << "config ok: " << reps << " replications x " << cc.n_patterns << " patterns, " << detectors.size()
                  << " detectors; nothing written\n";
        return 0;
    }

    const RngSeed root{seed};
    const BookingControls controls = controls_of(cfg, s, root.derive(0), c.workers);
    std::vector<Collection> cols;
    for (int r = 0; r < reps; ++r) cols.push_back(build_collection(cc, s, controls, root.derive(1, r), c.workers));

    OutputDir out(c.out);
    const RngSeed det_seed = root.derive(2);
    if (!foresight.empty()) {
        const auto rows = foresight_sweep(cols, detectors, foresight, det_seed, c.workers);
        out.write_with("foresight.csv", [&](std::ostream& os) { csv::write_sweep(os, rows); });
    }
    if (hindsight) {
        const auto rows = hindsight_report(cols, detectors, det_seed, c.workers);
        out.write_with("hindsight.csv", [&](std::ostream& os) {
            os << "detector,final_bcr,mean_bcr\n";
            for (const auto& r : rows) os << r.detector << ',' << csv::fmt(r.final_bcr) << ',' << csv::fmt(r.mean_bcr) << '\n';
        });
    }
    if (!roc_taus.empty()) {
        out.write_with("roc.csv", [&](std::ostream& os) {
            os << "detector,interval,threshold,fpr,tpr\n";
            std::ostringstream auc;
            for (std::size_t d = 0; d < detectors.size(); ++d) {
                for (int tau : roc_taus) {
                    std::vector<double> scores;
                    std::vector<bool> truth;
                    for (std::size_t r = 0; r < cols.size(); ++r) {
                        const auto det = make_detector(detectors[d], cols[r].n_intervals, cols[r].capacity,
                                                       det_seed.derive(r, d), c.workers);
                        const auto res = det->detect(cols[r].totals(tau));
                        if (res.abstained) continue;
                        const auto t = cols[r].truth();
                        scores.insert(scores.end(), res.scores.begin(), res.scores.end());
                        truth.insert(truth.end(), t.begin(), t.end());
                    }
                    if (scores.empty() || std::count(truth.begin(), truth.end(), true) == 0 ||
                        std::count(truth.begin(), truth.end(), false) == 0)
                        continue;
                    const RocCurve roc = roc_sweep(scores, truth);
                    csv::write_roc(os, detectors[d].name(), tau, roc);
                    auc << detectors[d].name() << ',' << tau << ',' << csv::fmt(roc.auc) << '\n';
                }
            }
            out.write("auc.csv", "detector,interval,auc\n" + auc.str());
        });
    }
    if (revenue) {
        const auto fds = get<std::vector<double>>(*revenue, "demand_factors", "revenue_factors.");
        const int n = get<int>(*revenue, "n_reps", "revenue_factors.");
        const bool published = get_or<std::string>(*revenue, "forecast", "published") == "published";
        ForecastProvider provider =
            published ? ForecastProvider([](const DemandScenario&, double fd) { return reference::published_forecast(fd); })
                      : monte_carlo_forecasts(get_or(*revenue, "forecast_runs", 100), root.derive(3), c.workers);
        std::vector<RevenueRow> rows;
        try {
            rows = revenue_comparison(s, fds, {Heuristic::EMSRb, Heuristic::EMSRbMR}, n, root.derive(4), provider, c.workers);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("invalid value for config key: revenue_factors: ") + e.what());
        }
        out.write_with("revenue_factors.csv", [&](std::ostream& os) {
            os << "f_D,heuristic,mean_revenue,sd_revenue,mean_bookings,ratio_vs_fcfs\n";
            for (const auto& r : rows)
                os << csv::fmt(r.demand_factor) << ',' << to_string(r.heuristic) << ',' << csv::fmt(r.mean_revenue) << ','
                   << csv::fmt(r.sd_revenue) << ',' << csv::fmt(r.mean_bookings) << ',' << csv::fmt(r.ratio_vs_fcfs) << '\n';
        });
    }
    if (gain) {
        const auto rows = revenue_gain_experiment(s, *gain, root.derive(5), c.workers);
        out.write_with("revenue_gain.csv", [&](std::ostream& os) { csv::write_revenue_gain(os, rows); });
    }
    out.manifest("benchmark", cfg, seed);
    std::cout << "benchmark done: " << reps << " replications, " << detectors.size() << " detectors\n";
    return 0;
}

int cmd_empirical(const std::string& input, int replicates, const Common& c) {
    std::ifstream in(input);
    if (!in) throw DataError("cannot read input: " + input);
    const IngestResult data = ingest(in);
    for (const auto& r : data.rejected) {
        std::cerr << "rejected pattern " << r.pattern_id << ": bookings decrease at row";
        for (long row : r.rows) std::cerr << ' ' << row;
        std::cerr << '\n';
    }
    FunctionalParams fp;
    if (replicates > 0) fp.bootstrap.replicates = replicates;
    fp.bootstrap.workers = c.workers;
    const EmpiricalReport rep = detect_empirical(data.patterns, fp, RngSeed{c.seed});

    OutputDir out(c.out);
    out.write_with("empirical_depths.csv", [&](std::ostream& os) {
        os << "pattern_id,depth,flagged\n";
        for (std::size_t i = 0; i < data.patterns.size(); ++i)
            os << data.patterns[i].pattern_id << ',' << csv::fmt(rep.detection.depth[i]) << ','
               << (rep.detection.detection.flags[i] ? 1 : 0) << '\n';
    });
    out.write_with("coefficients.csv", [&](std::ostream& os) {
        os << "term,interval_index,coefficient,present\n";
        const auto& reg = rep.regression;
        for (std::size_t k = 0; k < reg.terms.size(); ++k)
            for (Eigen::Index t = 0; t < reg.coefficients.cols(); ++t)
                os << reg.terms[k] << ',' << t + 1 << ',' << csv::fmt(reg.coefficients(static_cast<Eigen::Index>(k), t)) << ','
                   << (reg.term_present[k] ? 1 : 0) << '\n';
    });
    out.write_with("rejected.csv", [&](std::ostream& os) {
        os << "pattern_id,row\n";
        for (const auto& r : data.rejected)
            for (long row : r.rows) os << r.pattern_id << ',' << row << '\n';
    });
    out.manifest("empirical", {{"input", fs::path(input).filename().string()}, {"replicates", fp.bootstrap.replicates}},
                 c.seed);
    std::cout << "patterns=" << data.patterns.size() << " rejected=" << data.rejected.size()
              << " flagged=" << rep.flagged_ids.size() << " fraction=" << csv::fmt(rep.flagged_fraction) << '\n';
    return 0;
}

int cmd_fixtures(int n_patterns, int n_intervals, const Common& c) {
    FixtureConfig fc;
    fc.n_patterns = n_patterns;
    fc.n_intervals = n_intervals;
    if (n_patterns < 1 || n_intervals < 2) throw ConfigError("fixtures need --patterns >= 1 and --intervals >= 2");
    const Fixture fx = make_fixture(fc, RngSeed{c.seed});
    OutputDir out(c.out);
    out.write_with("empirical_fixture.csv", [&](std::ostream& os) { write_empirical_csv(os, fx.patterns); });
    out.write_with("fixture_outliers.csv", [&](std::ostream& os) {
        os << "pattern_id\n";
        for (const auto& id : fx.outlier_ids) os << id << '\n';
    });
    out.manifest("fixtures", {{"patterns", n_patterns}, {"intervals", n_intervals}}, c.seed);
    std::cout << "patterns=" << fx.patterns.size() << " injected_outliers=" << fx.outlier_ids.size() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Booking-pattern simulation and outlier detection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common common;
    auto add_common = [&](CLI::App* sub, bool needs_out) {
        auto* o = sub->add_option("--out", common.out, "output directory");
        if (needs_out) o->required();
        sub->add_option("--seed", common.seed, "random seed");
        sub->add_option("--workers", common.workers, "worker threads")->check(CLI::PositiveNumber);
    };

    std::string config;
    bool dry_run = false;
    auto* simulate = app.add_subcommand("simulate", "simulate a labelled collection of booking patterns");
    simulate->add_option("--config", config, "scenario/experiment JSON")->required();
    simulate->add_flag("--dry-run", dry_run, "validate the config and exit");
    add_common(simulate, true);

    std::string patterns, method, extrap;
    std::vector<int> taus;
    int capacity = 200, replicates = 0;
    auto* detect = app.add_subcommand("detect", "run an outlier detector on a pattern file");
    detect->add_option("--patterns", patterns, "patterns.csv from simulate")->required();
    detect->add_option("--method", method, "detector id")->required();
    detect->add_option("--extrapolate", extrap, "complete prefixes first: ses, arima or igarch");
    detect->add_option("--tau", taus, "observed intervals (repeatable; default T)");
    detect->add_option("--capacity", capacity, "cabin capacity");
    detect->add_option("--replicates", replicates, "bootstrap replicates for functional_depth");
    add_common(detect, true);

    auto* extrapolate_cmd = app.add_subcommand("extrapolate", "complete pattern prefixes to the full horizon");
    extrapolate_cmd->add_option("--patterns", patterns, "patterns.csv from simulate")->required();
    extrapolate_cmd->add_option("--method", method, "ses, arima or igarch")->required();
    extrapolate_cmd->add_option("--tau", taus, "observed intervals (repeatable)")->required();
    extrapolate_cmd->add_option("--capacity", capacity, "cabin capacity");
    add_common(extrapolate_cmd, true);

    auto* benchmark = app.add_subcommand("benchmark", "run detection and revenue experiments");
    benchmark->add_option("--config", config, "benchmark JSON")->required();
    benchmark->add_flag("--dry-run", dry_run, "validate the config and exit without writing");
    add_common(benchmark, false);

    std::string input;
    auto* empirical = app.add_subcommand("empirical", "regress out covariates and detect outlying departures");
    empirical->add_option("--input", input, "CSV with pattern_id,interval_index,cumulative_bookings,day_of_week,shortened_horizon")
        ->required();
    empirical->add_option("--replicates", replicates, "bootstrap replicates");
    add_common(empirical, true);

    int fixture_patterns = 1387, fixture_intervals = 18;
    auto* fixtures = app.add_subcommand("fixtures", "write a synthetic railway-like data set");
    fixtures->add_option("--patterns", fixture_patterns, "number of departures");
    fixtures->add_option("--intervals", fixture_intervals, "booking intervals per departure");
    add_common(fixtures, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    for (auto* sub : {simulate, benchmark}) {
        if (sub->parsed()) common.seed_given = sub->count("--seed") > 0;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(config, common, dry_run);
        if (detect->parsed()) return cmd_detect(patterns, method, extrap, taus, capacity, replicates, common);
        if (extrapolate_cmd->parsed()) return cmd_extrapolate(patterns, method, taus, capacity, common);
        if (benchmark->parsed()) {
            if (!dry_run && common.out.empty()) throw ConfigError("--out is required unless --dry-run is given");
            return cmd_benchmark(config, common, dry_run);
        }
        if (empirical->parsed()) return cmd_empirical(input, replicates, common);
        if (fixtures->parsed()) return cmd_fixtures(fixture_patterns, fixture_intervals, common);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
