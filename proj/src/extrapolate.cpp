#include "rmsim/extrapolate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rmsim/optim.hpp"
#include "rmsim/parallel.hpp"
#include "rmsim/stats.hpp"

namespace rmsim {

std::string to_string(ExtrapolationMethod m) {
    switch (m) {
        case ExtrapolationMethod::SES: return "ses";
        case ExtrapolationMethod::ARIMA: return "arima";
        case ExtrapolationMethod::IGARCH: return "igarch";
    }
    return "unknown";
}

ExtrapolationMethod extrapolation_method_from_string(const std::string& s) {
    if (s == "ses") return ExtrapolationMethod::SES;
    if (s == "arima") return ExtrapolationMethod::ARIMA;
    if (s == "igarch") return ExtrapolationMethod::IGARCH;
    throw std::invalid_argument("unknown extrapolation method: " + s + " (valid: ses, arima, igarch)");
}

std::vector<double> CompletedPattern::full() const {
    std::vector<double> out(observed_prefix);
    out.insert(out.end(), extrapolated_suffix.begin(), extrapolated_suffix.end());
    return out;
}

// ---- SES -----------------------------------------------------------------

namespace {

double ses_sse(std::span<const double> x, double alpha, double* final_level) {
    double level = x[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        const double e = x[t] - level;
        sse += e * e;
        level = alpha * x[t] + (1.0 - alpha) * level;
    }
    if (final_level) *final_level = level;
    return sse;
}

}  // namespace

SesFit fit_ses(std::span<const double> x, std::optional<double> alpha) {
    if (x.empty()) throw std::invalid_argument("SES needs at least one observation");
    SesFit fit;
    if (alpha) {
        if (*alpha < 0.0 || *alpha > 1.0) throw std::invalid_argument("SES alpha outside [0,1]");
        fit.alpha = *alpha;
    } else {
        // Golden-section search on [0, 1].
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = 0.0, b = 1.0;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = ses_sse(x, c, nullptr), fd = ses_sse(x, d, nullptr);
        for (int it = 0; it < 60; ++it) {
            if (fc <= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = ses_sse(x, c, nullptr);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = ses_sse(x, d, nullptr);
            }
        }
        fit.alpha = 0.5 * (a + b);
    }
    ses_sse(x, fit.alpha, &fit.level);
    return fit;
}

// ---- ARIMA ---------------------------------------------------------------

std::vector<double> difference(std::span<const double> x, int d) {
    if (d < 0) throw std::invalid_argument("negative differencing order");
    std::vector<double> out(x.begin(), x.end());
    for (int k = 0; k < d; ++k) {
        if (out.size() < 2) return {};
        for (std::size_t t = 0; t + 1 < out.size(); ++t) out[t] = out[t + 1] - out[t];
        out.pop_back();
    }
    return out;
}

int select_differencing(std::span<const double> x, int max_d) {
    int best = 0;
    double best_var = std::numeric_limits<double>::infinity();
    for (int d = 0; d <= max_d; ++d) {
        const auto dx = difference(x, d);
        if (dx.size() < 2) break;
        const double v = stats::variance(dx);
        if (d == 0 || v < best_var - 1e-12 * (1.0 + std::abs(best_var))) {
            best_var = v;
            best = d;
        }
    }
    return best;
}

bool roots_outside_unit_circle(const std::vector<double>& c, int sign) {
    std::size_t m = c.size();
    while (m > 0 && c[m - 1] == 0.0) --m;
    if (m == 0) return true;
    // Reciprocal roots are the eigenvalues of the companion matrix.
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) comp(0, static_cast<Eigen::Index>(i)) = sign < 0 ? c[i] : -c[i];
    for (std::size_t i = 1; i < m; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    const Eigen::VectorXcd ev = comp.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) >= 1.0 - 1e-8) return false;
    }
    return true;
}

namespace {

// Residuals e_t for t >= p; entries before p are zero.
std::vector<double> arma_residuals(std::span<const double> x, int p, int q, double mu, const double* phi,
                                   const double* theta) {
    std::vector<double> e(x.size(), 0.0);
    for (std::size_t t = static_cast<std::size_t>(p); t < x.size(); ++t) {
        double pred = 0.0;
        for (int i = 1; i <= p; ++i) pred += phi[i - 1] * (x[t - static_cast<std::size_t>(i)] - mu);
        for (int j = 1; j <= q; ++j) {
            if (t >= static_cast<std::size_t>(j)) pred += theta[j - 1] * e[t - static_cast<std::size_t>(j)];
        }
        e[t] = (x[t] - mu) - pred;
    }
    return e;
}

}  // namespace

std::vector<double> ArmaFit::residuals(std::span<const double> x) const {
    return arma_residuals(x, p, q, mu, phi.data(), theta.data());
}

std::vector<double> ArmaFit::forecast(std::span<const double> x, int h) const {
    std::vector<double> e = residuals(x);
    std::vector<double> ext(x.begin(), x.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(h, 0)));
    for (int s = 0; s < h; ++s) {
        const std::size_t t = ext.size();
        double v = mu;
        for (int i = 1; i <= p; ++i) {
            if (t >= static_cast<std::size_t>(i)) v += phi[static_cast<std::size_t>(i - 1)] * (ext[t - static_cast<std::size_t>(i)] - mu);
        }
        for (int j = 1; j <= q; ++j) {
            if (t >= static_cast<std::size_t>(j)) v += theta[static_cast<std::size_t>(j - 1)] * e[t - static_cast<std::size_t>(j)];
        }
        ext.push_back(v);
        e.push_back(0.0);
        out.push_back(v);
    }
    return out;
}

ArmaFit fit_arma(std::span<const double> x, int p, int q, bool include_mean) {
    if (p < 0 || q < 0) throw std::invalid_argument("negative ARMA order");
    const int n = static_cast<int>(x.size());
    if (n <= p) throw std::invalid_argument("series too short for the AR order");
    ArmaFit fit;
    fit.p = p;
    fit.q = q;
    fit.include_mean = include_mean;
    const double xbar = stats::mean(x);
    const double scale = std::max(stats::variance(x), 1e-12);

    const int k = (include_mean ? 1 : 0) + p + q;
    auto unpack = [&](const std::vector<double>& v, double& mu, std::vector<double>& phi, std::vector<double>& theta) {
        std::size_t i = 0;
        mu = include_mean ? v[i++] : 0.0;
        phi.assign(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(i) + p);
        i += static_cast<std::size_t>(p);
        theta.assign(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(i) + q);
    };
    auto objective = [&](const std::vector<double>& v) {
        double mu;
        std::vector<double> phi, theta;
        unpack(v, mu, phi, theta);
        if (!roots_outside_unit_circle(phi, -1) || !roots_outside_unit_circle(theta, +1))
            return std::numeric_limits<double>::infinity();
        const auto e = arma_residuals(x, p, q, mu, phi.data(), theta.data());
        double s = 0.0;
        for (std::size_t t = static_cast<std::size_t>(p); t < e.size(); ++t) s += e[t] * e[t];
        return s / scale;
    };

    std::vector<double> start(static_cast<std::size_t>(k), 0.0);
    if (include_mean) start[0] = xbar;
    OptimResult best;
    if (k == 0) {
        best.x = {};
        best.value = objective(start);
        best.converged = true;
    } else {
        best = nelder_mead(objective, start, 0.1, 400 * (k + 1), 1e-10);
        // One restart from the optimum guards against early simplex collapse.
        OptimResult again = nelder_mead(objective, best.x, 0.05, 400 * (k + 1), 1e-10);
        if (again.value <= best.value) {
            again.converged = again.converged || best.converged;
            best = again;
        }
    }
    unpack(best.x, fit.mu, fit.phi, fit.theta);
    fit.converged = best.converged;
    fit.admissible = roots_outside_unit_circle(fit.phi, -1) && roots_outside_unit_circle(fit.theta, +1);
    const auto e = fit.residuals(x);
    fit.css = 0.0;
    for (std::size_t t = static_cast<std::size_t>(p); t < e.size(); ++t) fit.css += e[t] * e[t];
    fit.n_used = n - p;
    fit.sigma2 = std::max(fit.css / fit.n_used, 1e-10 * (1.0 + xbar * xbar));
    const double K = k + 1.0;
    const double loglik = -0.5 * fit.n_used * (std::log(2.0 * std::numbers::pi * fit.sigma2) + 1.0);
    if (fit.n_used - K - 1.0 > 0.0)
        fit.aicc = -2.0 * loglik + 2.0 * K + 2.0 * K * (K + 1.0) / (fit.n_used - K - 1.0);
    return fit;
}

std::string ArimaFit::summary() const {
    std::ostringstream os;
    os << "ARIMA(" << arma.p << ',' << d << ',' << arma.q << ')';
    return os.str();
}

std::vector<double> ArimaFit::forecast(std::span<const double> series, int h) const {
    std::vector<std::vector<double>> levels{std::vector<double>(series.begin(), series.end())};
    for (int k = 1; k <= d; ++k) levels.push_back(difference(levels.back(), 1));
    std::vector<double> f = arma.forecast(levels.back(), h);
    for (int k = d - 1; k >= 0; --k) {
        double last = levels[static_cast<std::size_t>(k)].back();
        for (double& v : f) {
            last += v;
            v = last;
        }
    }
    return f;
}

std::optional<ArimaFit> auto_arima(std::span<const double> series, int max_order) {
    const int d = select_differencing(series);
    const auto x = difference(series, d);
    if (x.size() < 3) return std::nullopt;
    std::optional<ArimaFit> best;
    for (int p = 0; p <= max_order; ++p) {
        for (int q = 0; q <= max_order; ++q) {
            if (static_cast<int>(x.size()) <= p) continue;
            ArmaFit fit = fit_arma(x, p, q, d < 2);
            if (!fit.admissible || !std::isfinite(fit.aicc)) continue;
            if (!best || fit.aicc < best->arma.aicc) best = ArimaFit{d, std::move(fit)};
        }
    }
    return best;
}

// ---- IGARCH --------------------------------------------------------------

std::optional<IgarchFit> fit_igarch(std::span<const double> x) {
    if (x.size() < 3) return std::nullopt;
    const double xbar = stats::mean(x);
    const double v0 = stats::variance(x);
    if (!(v0 > 1e-12)) return std::nullopt;

    auto nll = [&](const std::vector<double>& v) {
        const double mu = v[0];
        const double omega = std::exp(v[1]);
        const double alpha = 1.0 / (1.0 + std::exp(-v[2]));
        double s2 = v0;
        double total = 0.0;
        for (std::size_t t = 0; t < x.size(); ++t) {
            const double e = x[t] - mu;
            total += std::log(s2) + e * e / s2;
            s2 = omega + alpha * e * e + (1.0 - alpha) * s2;
        }
        return 0.5 * total;
    };
    const std::vector<double> start{xbar, std::log(0.05 * v0), std::log(0.1 / 0.9)};
    OptimResult r = nelder_mead(nll, start, 0.2, 6000, 1e-10);
    OptimResult again = nelder_mead(nll, r.x, 0.1, 6000, 1e-10);
    if (again.value <= r.value) {
        again.converged = again.converged || r.converged;
        r = again;
    }
    if (!std::isfinite(r.value) || r.value >= std::numeric_limits<double>::max()) return std::nullopt;
    IgarchFit fit;
    fit.mu = r.x[0];
    fit.omega = std::exp(r.x[1]);
    fit.alpha = 1.0 / (1.0 + std::exp(-r.x[2]));
    fit.loglik = -r.value - 0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi);
    fit.converged = r.converged;
    return fit;
}

// ---- pattern completion --------------------------------------------------

namespace {

std::vector<double> with_origin(std::span<const double> prefix) {
    std::vector<double> s{0.0};
    s.insert(s.end(), prefix.begin(), prefix.end());
    return s;
}

// Turns a forecast cumulative path into a non-decreasing suffix capped at capacity.
std::vector<double> clamp_suffix(double last, const std::vector<double>& path, double capacity) {
    std::vector<double> out;
    out.reserve(path.size());
    double prev_path = last;
    double level = std::min(last, capacity);
    for (double v : path) {
        const double inc = std::isfinite(v) ? std::max(0.0, v - prev_path) : 0.0;
        prev_path = std::isfinite(v) ? v : prev_path;
        level = std::min(level + inc, std::max(capacity, last));
        out.push_back(level);
    }
    return out;
}

CompletedPattern start_completion(std::span<const double> prefix, int n_intervals, ExtrapolationMethod m) {
    const int tau = static_cast<int>(prefix.size());
    if (tau < 1 || tau > n_intervals) throw std::invalid_argument("prefix length must lie in [1, T]");
    CompletedPattern c;
    c.method = m;
    c.observed_prefix.assign(prefix.begin(), prefix.end());
    return c;
}

}  // namespace

CompletedPattern ses_extrapolate(std::span<const double> prefix, int n_intervals, std::optional<double> alpha,
                                 double capacity) {
    CompletedPattern c = start_completion(prefix, n_intervals, ExtrapolationMethod::SES);
    const int h = n_intervals - static_cast<int>(prefix.size());
    if (h == 0) {
        c.model_summary = "none";
        return c;
    }
    if (prefix.size() < 2) throw std::invalid_argument("SES completion needs tau >= 2");
    const auto inc = difference(with_origin(prefix), 1);
    const SesFit fit = fit_ses(inc, alpha);
    std::vector<double> path;
    double level = prefix.back();
    for (int s = 0; s < h; ++s) path.push_back(level += fit.level);
    c.extrapolated_suffix = clamp_suffix(prefix.back(), path, capacity);
    std::ostringstream os;
    os << "SES(alpha=" << fit.alpha << ')';
    c.model_summary = os.str();
    return c;
}

CompletedPattern arima_extrapolate(std::span<const double> prefix, int n_intervals, double capacity) {
    const int h = n_intervals - static_cast<int>(prefix.size());
    if (h > 0 && prefix.size() < 5) throw std::invalid_argument("ARIMA completion needs tau >= 5");
    CompletedPattern c = start_completion(prefix, n_intervals, ExtrapolationMethod::ARIMA);
    if (h == 0) {
        c.model_summary = "none";
        return c;
    }
    const auto series = with_origin(prefix);
    const auto fit = auto_arima(series);
    if (!fit) {
        c = ses_extrapolate(prefix, n_intervals, 0.5, capacity);
        c.method = ExtrapolationMethod::ARIMA;
        c.fallback = true;
        c.model_summary = "fallback " + c.model_summary;
        return c;
    }
    c.extrapolated_suffix = clamp_suffix(prefix.back(), fit->forecast(series, h), capacity);
    c.model_summary = fit->summary();
    return c;
}

CompletedPattern igarch_extrapolate(std::span<const double> prefix, int n_intervals, double capacity) {
    const int h = n_intervals - static_cast<int>(prefix.size());
    if (h > 0 && prefix.size() < 10) throw std::invalid_argument("IGARCH completion needs tau >= 10");
    CompletedPattern c = start_completion(prefix, n_intervals, ExtrapolationMethod::IGARCH);
    if (h == 0) {
        c.model_summary = "none";
        return c;
    }
    const auto series = with_origin(prefix);
    const int d = select_differencing(series);
    const auto x = difference(series, d);
    const auto fit = fit_igarch(x);
    if (!fit || !fit->converged) {
        c = ses_extrapolate(prefix, n_intervals, 0.5, capacity);
        c.method = ExtrapolationMethod::IGARCH;
        c.fallback = true;
        c.model_summary = "fallback " + c.model_summary;
        return c;
    }
    // Constant mean forecast of the differenced series, integrated d times.
    std::vector<double> f(static_cast<std::size_t>(h), fit->mu);
    std::vector<std::vector<double>> levels{series};
    for (int k = 1; k <= d; ++k) levels.push_back(difference(levels.back(), 1));
    for (int k = d - 1; k >= 0; --k) {
        double last = levels[static_cast<std::size_t>(k)].back();
        for (double& v : f) {
            last += v;
            v = last;
        }
    }
    c.extrapolated_suffix = clamp_suffix(prefix.back(), f, capacity);
    std::ostringstream os;
    os << "IGARCH(1," << d << ",1) alpha=" << fit->alpha;
    c.model_summary = os.str();
    return c;
}

int min_prefix_length(ExtrapolationMethod m) {
    switch (m) {
        case ExtrapolationMethod::SES: return 2;
        case ExtrapolationMethod::ARIMA: return 5;
        case ExtrapolationMethod::IGARCH: return 10;
    }
    return 2;
}

CompletedPattern extrapolate(ExtrapolationMethod m, std::span<const double> prefix, int n_intervals, double capacity) {
    const bool complete = static_cast<int>(prefix.size()) == n_intervals;
    if (!complete && static_cast<int>(prefix.size()) < min_prefix_length(m)) {
        CompletedPattern c = ses_extrapolate(prefix, n_intervals, 0.5, capacity);
        c.method = m;
        c.fallback = m != ExtrapolationMethod::SES;
        if (c.fallback) c.model_summary = "fallback " + c.model_summary;
        return c;
    }
    switch (m) {
        case ExtrapolationMethod::SES: return ses_extrapolate(prefix, n_intervals, std::nullopt, capacity);
        case ExtrapolationMethod::ARIMA: return arima_extrapolate(prefix, n_intervals, capacity);
        case ExtrapolationMethod::IGARCH: return igarch_extrapolate(prefix, n_intervals, capacity);
    }
    throw std::logic_error("unhandled extrapolation method");
}

std::vector<CompletedPattern> complete_collection(const Eigen::MatrixXd& prefixes, int n_intervals,
                                                  ExtrapolationMethod m, double capacity, unsigned workers) {
    if (prefixes.cols() > n_intervals) throw std::invalid_argument("prefix longer than the horizon");
    std::vector<CompletedPattern> out(static_cast<std::size_t>(prefixes.rows()));
    parallel_for(out.size(), workers, [&](std::size_t n) {
        std::vector<double> row(static_cast<std::size_t>(prefixes.cols()));
        for (Eigen::Index t = 0; t < prefixes.cols(); ++t) row[static_cast<std::size_t>(t)] = prefixes(static_cast<Eigen::Index>(n), t);
        out[n] = extrapolate(m, row, n_intervals, capacity);
    });
    return out;
}

Eigen::MatrixXd to_matrix(const std::vector<CompletedPattern>& completed) {
    if (completed.empty()) return {};
    const auto T = static_cast<Eigen::Index>(completed.front().full().size());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(completed.size()), T);
    for (std::size_t n = 0; n < completed.size(); ++n) {
        const auto f = completed[n].full();
        for (Eigen::Index t = 0; t < T; ++t) m(static_cast<Eigen::Index>(n), t) = f[static_cast<std::size_t>(t)];
    }
    return m;
}

IntervalDetection ExtrapolatingDetector::detect(const Eigen::MatrixXd& prefix) const {
    if (prefix.cols() < 2 && prefix.cols() < n_intervals_)
        return IntervalDetection::abstain(static_cast<std::size_t>(prefix.rows()), "prefix too short to extrapolate");
    if (prefix.cols() >= n_intervals_) return inner_->detect(prefix);
    return inner_->detect(to_matrix(complete_collection(prefix, n_intervals_, method_, capacity_, workers_)));
}

}  // namespace rmsim
