#include "rmsim/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>

#include "rmsim/csv_io.hpp"
#include "rmsim/errors.hpp"

namespace rmsim {

IngestResult ingest(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("input is empty");
    const std::vector<std::string> expected{"pattern_id", "interval_index", "cumulative_bookings", "day_of_week",
                                            "shortened_horizon"};
    if (csv::split(line) != expected)
        throw DataError("schema mismatch: header must be "
                        "pattern_id,interval_index,cumulative_bookings,day_of_week,shortened_horizon");

    struct Row {
        long row;
        double value;
    };
    struct Acc {
        std::map<int, Row> values;
        int dow = -1;
        int shortened = -1;
    };
    std::map<std::string, Acc> acc;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto f = csv::split(line);
        if (f.size() != expected.size())
            throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(expected.size()) + " fields");
        int t, dow, sh;
        double v;
        try {
            t = std::stoi(f[1]);
            v = std::stod(f[2]);
            dow = std::stoi(f[3]);
            sh = std::stoi(f[4]);
        } catch (const std::logic_error&) {
            throw DataError("row " + std::to_string(row) + ": non-numeric field");
        }
        if (dow < 0 || dow > 6) throw DataError("row " + std::to_string(row) + ": day_of_week outside 0..6");
        if (sh != 0 && sh != 1) throw DataError("row " + std::to_string(row) + ": shortened_horizon must be 0 or 1");
        if (!std::isfinite(v)) throw DataError("row " + std::to_string(row) + ": cumulative_bookings is not finite");
        Acc& a = acc[f[0]];
        if (!a.values.emplace(t, Row{row, v}).second)
            throw DataError("duplicate key (pattern_id=" + f[0] + ", interval_index=" + f[1] + ")");
        if ((a.dow >= 0 && a.dow != dow) || (a.shortened >= 0 && a.shortened != sh))
            throw DataError("pattern " + f[0] + ": covariates change between rows");
        a.dow = dow;
        a.shortened = sh;
    }

    IngestResult res;
    std::size_t length = 0;
    for (const auto& [id, a] : acc) {
        if (length == 0) length = a.values.size();
        if (a.values.size() != length)
            throw DataError("ragged lengths: pattern " + id + " has " + std::to_string(a.values.size()) +
                            " intervals, expected " + std::to_string(length));
        EmpiricalPattern p;
        p.pattern_id = id;
        p.day_of_week = a.dow;
        p.shortened_horizon = a.shortened == 1;
        Rejection rej{id, {}};
        int expect = 1;
        for (const auto& [t, r] : a.values) {
            if (t != expect++) throw DataError("pattern " + id + ": interval_index must run 1..T without gaps");
            if (!p.values.empty() && r.value < p.values.back()) rej.rows.push_back(r.row);
            p.values.push_back(r.value);
        }
        if (rej.rows.empty()) res.patterns.push_back(std::move(p));
        else res.rejected.push_back(std::move(rej));
    }
    if (acc.empty()) throw DataError("input has no data rows");
    return res;
}

void write_empirical_csv(std::ostream& os, const std::vector<EmpiricalPattern>& patterns) {
    os << "pattern_id,interval_index,cumulative_bookings,day_of_week,shortened_horizon\n";
    for (const auto& p : patterns) {
        for (std::size_t t = 0; t < p.values.size(); ++t)
            os << p.pattern_id << ',' << t + 1 << ',' << csv::fmt(p.values[t]) << ',' << p.day_of_week << ','
               << (p.shortened_horizon ? 1 : 0) << '\n';
    }
}

RegressionResult pointwise_regression(const std::vector<EmpiricalPattern>& patterns) {
    if (patterns.empty()) throw DataError("no patterns to regress");
    const auto N = static_cast<Eigen::Index>(patterns.size());
    const auto T = static_cast<Eigen::Index>(patterns.front().values.size());
    RegressionResult res;
    res.terms = {"intercept", "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "shortened_horizon"};
    const Eigen::Index P = static_cast<Eigen::Index>(res.terms.size());

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N, P);
    Eigen::MatrixXd Y(N, T);
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto& p = patterns[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(p.values.size()) != T) throw DataError("ragged pattern lengths");
        X(i, 0) = 1.0;
        if (p.day_of_week >= 1 && p.day_of_week <= 6) X(i, p.day_of_week) = 1.0;
        if (p.shortened_horizon) X(i, 7) = 1.0;
        for (Eigen::Index t = 0; t < T; ++t) Y(i, t) = p.values[static_cast<std::size_t>(t)];
    }

    std::vector<Eigen::Index> used;
    res.term_present.assign(static_cast<std::size_t>(P), false);
    for (Eigen::Index c = 0; c < P; ++c) {
        if (c > 0 && X.col(c).isZero()) continue;
        used.push_back(c);
        Eigen::MatrixXd sub(N, static_cast<Eigen::Index>(used.size()));
        for (std::size_t k = 0; k < used.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = X.col(used[k]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
        if (qr.rank() < static_cast<Eigen::Index>(used.size()))
            throw DataError("design matrix is rank deficient: indicator '" + res.terms[static_cast<std::size_t>(c)] +
                            "' is collinear with earlier terms");
        res.term_present[static_cast<std::size_t>(c)] = true;
    }

    Eigen::MatrixXd Xu(N, static_cast<Eigen::Index>(used.size()));
    for (std::size_t k = 0; k < used.size(); ++k) Xu.col(static_cast<Eigen::Index>(k)) = X.col(used[k]);
    const Eigen::MatrixXd B = Xu.colPivHouseholderQr().solve(Y);
    res.coefficients = Eigen::MatrixXd::Zero(P, T);
    for (std::size_t k = 0; k < used.size(); ++k) res.coefficients.row(used[k]) = B.row(static_cast<Eigen::Index>(k));
    res.residuals = Y - Xu * B;
    return res;
}

EmpiricalReport detect_empirical(const std::vector<EmpiricalPattern>& patterns, const FunctionalParams& params,
                                 RngSeed seed) {
    EmpiricalReport rep;
    rep.regression = pointwise_regression(patterns);
    rep.detection = functional_detect(rep.regression.residuals, params, seed);
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        if (rep.detection.detection.flags[i]) rep.flagged_ids.push_back(patterns[i].pattern_id);
    }
    rep.flagged_fraction = patterns.empty() ? 0.0 : static_cast<double>(rep.flagged_ids.size()) / patterns.size();
    return rep;
}

Fixture make_fixture(const FixtureConfig& config, RngSeed seed) {
    if (config.n_patterns < 1 || config.n_intervals < 2) throw std::invalid_argument("fixture needs patterns and intervals");
    static const double weekday_level[7] = {150, 110, 95, 95, 105, 170, 120};  // Sunday first
    Fixture fx;
    const int T = config.n_intervals;
    for (int i = 0; i < config.n_patterns; ++i) {
        std::mt19937_64 rng(seed.derive(static_cast<std::uint64_t>(i)).value);
        std::uniform_int_distribution<int> day(0, 6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::normal_distribution<double> z(0.0, 1.0);
        EmpiricalPattern p;
        char id[16];
        std::snprintf(id, sizeof id, "D%05d", i);
        p.pattern_id = id;
        p.day_of_week = day(rng);
        p.shortened_horizon = u(rng) < config.shortened_share;
        double level = weekday_level[p.day_of_week] * std::max(0.5, 1.0 + 0.08 * z(rng));
        if (p.shortened_horizon) level *= 0.8;
        const bool outlier = u(rng) < config.outlier_share;
        if (outlier) {
            level *= u(rng) < 0.5 ? 0.45 : 1.7;
            fx.outlier_ids.push_back(p.pattern_id);
        }
        // Logistic build-up; a shortened horizon opens sales three intervals late.
        const int start = p.shortened_horizon ? 3 : 0;
        auto shape = [&](int t) {
            if (t <= start) return 0.0;
            const double x = (t - start) / static_cast<double>(T - start);
            return 1.0 / (1.0 + std::exp(-9.0 * (x - 0.65)));
        };
        const double norm = shape(T);
        double cum = 0.0;
        for (int t = 1; t <= T; ++t) {
            const double mean_inc = level * (shape(t) - shape(t - 1)) / norm;
            std::poisson_distribution<int> inc(std::max(mean_inc, 1e-9));
            cum += inc(rng);
            p.values.push_back(cum);
        }
        fx.patterns.push_back(std::move(p));
    }
    return fx;
}

}  // namespace rmsim
