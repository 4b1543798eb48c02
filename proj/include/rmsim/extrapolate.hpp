#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmsim/detect_baseline.hpp"

namespace rmsim {

enum class ExtrapolationMethod { SES, ARIMA, IGARCH };

std::string to_string(ExtrapolationMethod m);
ExtrapolationMethod extrapolation_method_from_string(const std::string& s);

/// A cumulative booking curve completed to the full horizon.
struct CompletedPattern {
    std::vector<double> observed_prefix;
    std::vector<double> extrapolated_suffix;
    ExtrapolationMethod method = ExtrapolationMethod::SES;
    std::string model_summary;
    bool fallback = false;  ///< the requested model could not be used

    std::vector<double> full() const;
};

// ---- series-level models -------------------------------------------------

struct SesFit {
    double alpha = 0.5;
    double level = 0.0;  ///< smoothed level after the last observation (the forecast)
};

/// Simple exponential smoothing with initial level x[0]. Without `alpha`, the
/// smoothing constant minimizes the one-step squared error on [0, 1].
SesFit fit_ses(std::span<const double> x, std::optional<double> alpha = std::nullopt);

std::vector<double> difference(std::span<const double> x, int d);

/// Smallest d in [0, max_d] whose differenced series has minimal sample variance.
int select_differencing(std::span<const double> x, int max_d = 2);

/// ARMA(p, q) with optional mean, fitted by conditional sum of squares:
/// (x_t - mu) = sum phi_i (x_{t-i} - mu) + e_t + sum theta_j e_{t-j}.
struct ArmaFit {
    int p = 0, q = 0;
    bool include_mean = true;
    double mu = 0.0;
    std::vector<double> phi, theta;
    double sigma2 = 0.0;
    double css = 0.0;
    double aicc = std::numeric_limits<double>::infinity();
    int n_used = 0;
    bool admissible = false;  ///< stationary and invertible
    bool converged = false;

    /// h-step forecasts continuing the series x the model was fitted to.
    std::vector<double> forecast(std::span<const double> x, int h) const;
    std::vector<double> residuals(std::span<const double> x) const;
};

ArmaFit fit_arma(std::span<const double> x, int p, int q, bool include_mean = true);

/// True when all roots of 1 - sum c_i z^i (sign = -1) or 1 + sum c_i z^i
/// (sign = +1) lie outside the unit circle.
bool roots_outside_unit_circle(const std::vector<double>& c, int sign);

struct ArimaFit {
    int d = 0;
    ArmaFit arma;

    std::string summary() const;
    /// h-step forecasts of the undifferenced series.
    std::vector<double> forecast(std::span<const double> series, int h) const;
};

/// Chooses d by variance minimization, then (p, q) in [0, max_order]^2 by AICc
/// over admissible fits. No mean term is fitted when d = 2. Returns nullopt if
/// no order can be fitted.
std::optional<ArimaFit> auto_arima(std::span<const double> series, int max_order = 3);

/// Constant-mean IGARCH(1,1): x_t = mu + e_t,
/// s2_t = omega + alpha e_{t-1}^2 + (1 - alpha) s2_{t-1}, fitted by Gaussian
/// conditional maximum likelihood with s2_1 = sample variance.
struct IgarchFit {
    double mu = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double loglik = 0.0;
    bool converged = false;
};

/// Returns nullopt for a series with zero variance or fewer than 3 points.
std::optional<IgarchFit> fit_igarch(std::span<const double> x);

// ---- pattern completion --------------------------------------------------

/// Completion from the cumulative prefix y(t_1..t_tau). Model inputs start at
/// the origin y(t_0) = 0. Suffixes never decrease and are capped at `capacity`.
CompletedPattern ses_extrapolate(std::span<const double> prefix, int n_intervals, std::optional<double> alpha = std::nullopt,
                                 double capacity = std::numeric_limits<double>::infinity());
CompletedPattern arima_extrapolate(std::span<const double> prefix, int n_intervals,
                                   double capacity = std::numeric_limits<double>::infinity());
CompletedPattern igarch_extrapolate(std::span<const double> prefix, int n_intervals,
                                    double capacity = std::numeric_limits<double>::infinity());

/// Minimum prefix length each method accepts (SES 2, ARIMA 5, IGARCH 10).
int min_prefix_length(ExtrapolationMethod m);

/// Dispatches to the method; prefixes shorter than its minimum fall back to SES.
CompletedPattern extrapolate(ExtrapolationMethod m, std::span<const double> prefix, int n_intervals,
                             double capacity = std::numeric_limits<double>::infinity());

/// Completes every row of `prefixes` (N x tau) from that row alone.
std::vector<CompletedPattern> complete_collection(const Eigen::MatrixXd& prefixes, int n_intervals,
                                                  ExtrapolationMethod m,
                                                  double capacity = std::numeric_limits<double>::infinity(),
                                                  unsigned workers = 1);

Eigen::MatrixXd to_matrix(const std::vector<CompletedPattern>& completed);

/// Completes prefixes to the full horizon, then runs the wrapped detector.
class ExtrapolatingDetector : public Detector {
public:
    ExtrapolatingDetector(std::shared_ptr<const Detector> inner, ExtrapolationMethod method, int n_intervals,
                          double capacity, unsigned workers = 1)
        : inner_(std::move(inner)), method_(method), n_intervals_(n_intervals), capacity_(capacity), workers_(workers) {}
    std::string id() const override { return inner_->id() + "+" + to_string(method_); }
    IntervalDetection detect(const Eigen::MatrixXd& prefix) const override;

private:
    std::shared_ptr<const Detector> inner_;
    ExtrapolationMethod method_;
    int n_intervals_;
    double capacity_;
    unsigned workers_;
};

}  // namespace rmsim
