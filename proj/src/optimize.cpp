#include "rabies/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "rabies/errors.hpp"

namespace rabies {

namespace {

void project(std::vector<double>& x, const std::vector<double>& lower,
             const std::vector<double>& upper)
{
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i < lower.size()) {
            x[i] = std::max(x[i], lower[i]);
        }
        if (i < upper.size()) {
            x[i] = std::min(x[i], upper[i]);
        }
    }
}

double sanitize(double v)
{
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

double sum_squares(const std::vector<double>& r)
{
    double s = 0.0;
    for (double v : r) {
        s += v * v;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

} // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options)
{
    const std::size_t n = x0.size();
    if (n == 0) {
        throw DomainError("Nelder-Mead needs at least one free variable");
    }
    NelderMeadResult result;
    auto eval = [&](std::vector<double>& x) {
        project(x, options.lower, options.upper);
        ++result.evaluations;
        return sanitize(f(x));
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> values(n + 1);
    values[0] = eval(simplex[0]);
    result.initial_value = values[0];
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += options.initial_step;
        // Step inward if the vertex would collapse onto the start after projection.
        if (i < options.upper.size() && simplex[i + 1][i] > options.upper[i]) {
            simplex[i + 1][i] = x0[i] - options.initial_step;
        }
        values[i + 1] = eval(simplex[i + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> v2;
        for (auto k : order) {
            s2.push_back(simplex[k]);
            v2.push_back(values[k]);
        }
        simplex = std::move(s2);
        values = std::move(v2);
    };

    auto converged = [&] {
        double diameter = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                diameter = std::max(diameter, std::abs(simplex[k][i] - simplex[0][i]));
            }
        }
        const double spread = values[n] - values[0];
        return diameter < options.diameter_tol ||
               (std::isfinite(spread) && spread < options.spread_tol * (1.0 + std::abs(values[0])));
    };

    sort_simplex();
    while (result.iterations < options.max_iterations) {
        if (converged()) {
            result.converged = true;
            break;
        }
        ++result.iterations;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += simplex[k][i] / static_cast<double>(n);
            }
        }
        auto along = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = centroid[i] + coef * (simplex[n][i] - centroid[i]);
            }
            return x;
        };

        std::vector<double> reflected = along(-1.0);
        const double f_reflected = eval(reflected);
        if (f_reflected < values[0]) {
            std::vector<double> expanded = along(-2.0);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                simplex[n] = expanded;
                values[n] = f_expanded;
            } else {
                simplex[n] = reflected;
                values[n] = f_reflected;
            }
        } else if (f_reflected < values[n - 1]) {
            simplex[n] = reflected;
            values[n] = f_reflected;
        } else {
            const bool outside = f_reflected < values[n];
            std::vector<double> contracted = along(outside ? -0.5 : 0.5);
            const double f_contracted = eval(contracted);
            if (f_contracted < (outside ? f_reflected : values[n])) {
                simplex[n] = contracted;
                values[n] = f_contracted;
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    for (std::size_t i = 0; i < n; ++i) {
                        simplex[k][i] = simplex[0][i] + 0.5 * (simplex[k][i] - simplex[0][i]);
                    }
                    values[k] = eval(simplex[k]);
                }
            }
        }
        sort_simplex();
        result.best_history.push_back(values[0]);
    }
    if (!result.converged && converged()) {
        result.converged = true;
    }
    result.x = simplex[0];
    result.value = values[0];
    return result;
}

std::vector<std::vector<double>> residual_jacobian(const ResidualFunction& r,
                                                   const std::vector<double>& x,
                                                   const std::vector<double>& steps)
{
    const std::size_t n = x.size();
    std::vector<std::vector<double>> columns(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> up = x;
        std::vector<double> down = x;
        up[j] += steps[j];
        down[j] -= steps[j];
        const auto ru = r(up);
        const auto rd = r(down);
        columns[j].resize(ru.size());
        for (std::size_t i = 0; i < ru.size(); ++i) {
            columns[j][i] = (ru[i] - rd[i]) / (up[j] - down[j]);
        }
    }
    std::vector<std::vector<double>> jac(columns.empty() ? 0 : columns[0].size(),
                                         std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < columns[j].size(); ++i) {
            jac[i][j] = columns[j][i];
        }
    }
    return jac;
}

LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& r, std::vector<double> x0,
                                             const LevenbergMarquardtOptions& options)
{
    const std::size_t n = x0.size();
    LevenbergMarquardtResult result;
    project(x0, options.lower, options.upper);
    result.x = x0;
    std::vector<double> res = r(result.x);
    result.value = sum_squares(res);
    double damping = options.initial_damping;

    for (int it = 0; it < options.max_iterations && result.value > 0.0; ++it) {
        result.iterations = it + 1;
        const auto jac = residual_jacobian(r, result.x, std::vector<double>(n, options.fd_step));
        const auto m = static_cast<Eigen::Index>(res.size());
        Eigen::MatrixXd J(m, static_cast<Eigen::Index>(n));
        Eigen::VectorXd rv(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            rv(i) = res[static_cast<std::size_t>(i)];
            for (std::size_t j = 0; j < n; ++j) {
                J(i, static_cast<Eigen::Index>(j)) = jac[static_cast<std::size_t>(i)][j];
            }
        }
        const Eigen::MatrixXd jtj = J.transpose() * J;
        const Eigen::VectorXd jtr = J.transpose() * rv;

        bool accepted = false;
        for (int attempt = 0; attempt < 20; ++attempt) {
            Eigen::MatrixXd a = jtj;
            for (Eigen::Index k = 0; k < a.rows(); ++k) {
                a(k, k) += damping * std::max(jtj(k, k), 1e-300);
            }
            const Eigen::VectorXd step = a.ldlt().solve(-jtr);
            if (!step.allFinite()) {
                damping *= 10.0;
                continue;
            }
            std::vector<double> trial = result.x;
            for (std::size_t j = 0; j < n; ++j) {
                trial[j] += step(static_cast<Eigen::Index>(j));
            }
            project(trial, options.lower, options.upper);
            auto trial_res = r(trial);
            const double trial_value = sum_squares(trial_res);
            if (trial_value < result.value) {
                result.x = std::move(trial);
                res = std::move(trial_res);
                const double gain = result.value - trial_value;
                result.value = trial_value;
                damping = std::max(damping / 10.0, 1e-12);
                accepted = true;
                if (step.cwiseAbs().maxCoeff() < options.step_tol ||
                    gain < 1e-15 * (1.0 + result.value)) {
                    return result;
                }
                break;
            }
            damping *= 10.0;
        }
        if (!accepted) {
            break;
        }
    }
    return result;
}

} // namespace rabies
