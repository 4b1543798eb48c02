#include "rmsim/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rmsim {

OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                        double step, int max_evaluations, double ftol) {
    const std::size_t n = x0.size();
    OptimResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    if (n == 0) {
        res.x = x0;
        res.value = eval(x0);
        res.converged = true;
        return res;
    }

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += x0[i] != 0.0 ? step * std::abs(x0[i]) + step : step;
    for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    while (res.evaluations < max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
        if (std::abs(values[worst] - values[best]) <= ftol * (std::abs(values[best]) + ftol)) {
            res.converged = true;
            break;
        }
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
        }
        auto along = [&](double coef, std::vector<double>& out) {
            for (std::size_t d = 0; d < n; ++d) out[d] = centroid[d] + coef * (simplex[worst][d] - centroid[d]);
        };
        along(-1.0, trial);
        const double fr = eval(trial);
        if (fr < values[best]) {
            along(-2.0, trial2);
            const double fe = eval(trial2);
            if (fe < fr) {
                simplex[worst] = trial2;
                values[worst] = fe;
            } else {
                simplex[worst] = trial;
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = trial;
            values[worst] = fr;
        } else {
            const bool outside = fr < values[worst];
            along(outside ? -0.5 : 0.5, trial2);
            const double fc = eval(trial2);
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = trial2;
                values[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d) simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
                    values[i] = eval(simplex[i]);
                }
            }
        }
    }
    const auto it = std::min_element(values.begin(), values.end());
    res.x = simplex[static_cast<std::size_t>(it - values.begin())];
    res.value = *it;
    return res;
}

}  // namespace rmsim
