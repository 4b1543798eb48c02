#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmsim/depth.hpp"
#include "rmsim/model.hpp"

namespace rmsim {

/// One observed departure. day_of_week: 0 = Sunday (reference level) .. 6 = Saturday.
struct EmpiricalPattern {
    std::string pattern_id;
    int day_of_week = 0;
    bool shortened_horizon = false;
    std::vector<double> values;
};

struct Rejection {
    std::string pattern_id;
    std::vector<long> rows;  ///< 1-based data rows (header excluded) where the value decreased
};

struct IngestResult {
    std::vector<EmpiricalPattern> patterns;  ///< sorted by pattern_id
    std::vector<Rejection> rejected;         ///< non-monotone patterns, excluded from `patterns`
};

/// Reads CSV with header pattern_id,interval_index,cumulative_bookings,day_of_week,shortened_horizon.
/// interval_index is 1-based; shortened_horizon is 0/1.
/// @throws DataError on schema mismatch, duplicate (pattern_id, interval_index),
/// gaps, ragged lengths or covariates that change within a pattern.
IngestResult ingest(std::istream& in);

void write_empirical_csv(std::ostream& os, const std::vector<EmpiricalPattern>& patterns);

struct RegressionResult {
    Eigen::MatrixXd coefficients;  ///< 8 x T: intercept, Mon..Sat, shortened horizon
    Eigen::MatrixXd residuals;     ///< N x T
    std::vector<std::string> terms;
    std::vector<bool> term_present;  ///< false for indicators that never occur (coefficient 0)
};

/// Pointwise OLS of values on {1, I_Mon, ..., I_Sat, I_shortened} at every
/// interval. Indicators that are identically zero are dropped.
/// @throws DataError naming the indicator when the remaining design is rank deficient.
RegressionResult pointwise_regression(const std::vector<EmpiricalPattern>& patterns);

struct EmpiricalReport {
    RegressionResult regression;
    FunctionalResult detection;
    std::vector<std::string> flagged_ids;
    double flagged_fraction = 0.0;
};

EmpiricalReport detect_empirical(const std::vector<EmpiricalPattern>& patterns, const FunctionalParams& params,
                                 RngSeed seed);

struct FixtureConfig {
    int n_patterns = 1387;
    int n_intervals = 18;
    double outlier_share = 0.05;
    double shortened_share = 0.08;
};

struct Fixture {
    std::vector<EmpiricalPattern> patterns;
    std::vector<std::string> outlier_ids;
};

/// Synthetic railway-like data: logistic booking curves with weekday and
/// shortened-horizon effects, plus patterns shifted by a multiple of their
/// own scale with probability outlier_share.
Fixture make_fixture(const FixtureConfig& config, RngSeed seed);

}  // namespace rmsim
