#pragma once

#include <functional>
#include <vector>

namespace rabies {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
    double initial_step = 0.1;
    double diameter_tol = 1e-8;  ///< max-norm distance of vertices from the best
    double spread_tol = 1e-12;   ///< f_worst - f_best < spread_tol * (1 + |f_best|)
    int max_iterations = 2000;
    std::vector<double> lower;   ///< optional box; vertices are projected onto it
    std::vector<double> upper;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    double initial_value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    /// Best objective value after each iteration (non-increasing).
    std::vector<double> best_history;
};

/// Nelder-Mead downhill simplex with the standard coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

using ResidualFunction = std::function<std::vector<double>(const std::vector<double>&)>;

struct LevenbergMarquardtOptions {
    int max_iterations = 50;
    double fd_step = 1e-6;       ///< absolute step in x for the residual Jacobian
    double initial_damping = 1e-3;
    double step_tol = 1e-12;
    std::vector<double> lower;
    std::vector<double> upper;
};

struct LevenbergMarquardtResult {
    std::vector<double> x;
    double value = 0.0; ///< sum of squared residuals
    int iterations = 0;
};

/// Levenberg-Marquardt on sum(r(x)^2). Only steps that lower the sum are accepted.
LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& r, std::vector<double> x0,
                                             const LevenbergMarquardtOptions& options = {});

/// Central-difference Jacobian of a residual vector (rows = residuals).
std::vector<std::vector<double>> residual_jacobian(const ResidualFunction& r,
                                                   const std::vector<double>& x,
                                                   const std::vector<double>& steps);

} // namespace rabies
