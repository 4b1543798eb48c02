#pragma once

#include <functional>
#include <vector>

namespace rmsim {

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free Nelder-Mead minimization. Converges when the spread of
/// simplex values falls below ftol (relative to |f| + ftol).
OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                        double step = 0.1, int max_evaluations = 4000, double ftol = 1e-10);

}  // namespace rmsim
