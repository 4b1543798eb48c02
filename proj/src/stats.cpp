#include "rmsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>

namespace rmsim::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double n = static_cast<double>(sorted.size());
    const double h = (n + 1.0) * p;
    if (h <= 1.0) return sorted.front();
    if (h >= n) return sorted.back();
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

double quantile(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    return quantile_sorted(x, p);
}

double median(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("median of empty sample");
    const std::size_t n = x.size();
    std::nth_element(x.begin(), x.begin() + n / 2, x.end());
    const double hi = x[n / 2];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(x.begin(), x.begin() + n / 2);
    return 0.5 * (lo + hi);
}

double mad(std::span<const double> x) {
    const double med = median(std::vector<double>(x.begin(), x.end()));
    std::vector<double> dev;
    dev.reserve(x.size());
    for (double v : x) dev.push_back(std::abs(v - med));
    return median(std::move(dev));
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

double binomial_cdf(int k, int n, double p) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    return boost::math::cdf(boost::math::binomial(n, p), k);
}

}  // namespace rmsim::stats
