#pragma once

#include <span>
#include <vector>

namespace rmsim::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance (divisor n-1). Returns 0 for n < 2.
double variance(std::span<const double> x);

/// Empirical quantile with weight (n+1)p on the order statistics, linearly
/// interpolated and clamped to the sample range.
double quantile(std::vector<double> x, double p);
/// Same as quantile() for input that is already sorted ascending.
double quantile_sorted(std::span<const double> sorted, double p);

double median(std::vector<double> x);
/// Median absolute deviation from the median (unscaled).
double mad(std::span<const double> x);

double normal_quantile(double p);
double normal_cdf(double x);

/// Binomial(n, p) CDF P(X <= k).
double binomial_cdf(int k, int n, double p);

}  // namespace rmsim::stats
