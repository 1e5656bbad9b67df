#include "rabies/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "rabies/csv.hpp"
#include "rabies/errors.hpp"

namespace rabies {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// PI controller constants.
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;

constexpr std::size_t N = kNumCompartments;

struct StepResult {
    StateVector y;
    StateVector k7; // derivative at the new point (first-same-as-last)
    StateVector err;
};

StateVector axpy(const StateVector& y, double h, std::initializer_list<std::pair<double, const StateVector*>> terms)
{
    StateVector out = y;
    for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (const auto& [coef, k] : terms) {
            acc += coef * (*k)[i];
        }
        out[i] += h * acc;
    }
    return out;
}

StepResult dopri_step(const RhsFunction& f, double t, const StateVector& y, const StateVector& k1,
                      double h)
{
    const StateVector k2 = f(t + c2 * h, axpy(y, h, {{a21, &k1}}));
    const StateVector k3 = f(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const StateVector k4 = f(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const StateVector k5 =
        f(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const StateVector k6 =
        f(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    StepResult r;
    r.y = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    r.k7 = f(t + h, r.y);
    for (std::size_t i = 0; i < N; ++i) {
        r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                        e7 * r.k7[i]);
    }
    return r;
}

double error_norm(const StepResult& r, const StateVector& y, const IntegratorConfig& cfg)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(r.y[i]));
        const double ratio = std::abs(r.err[i]) / scale;
        if (!std::isfinite(ratio)) {
            return std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, ratio);
    }
    return worst;
}

/// Adaptive stepping state carried across consecutive segments.
class Driver {
public:
    Driver(const RhsFunction& f, const StateVector& y0, double t0, const IntegratorConfig& cfg)
        : f_(f), cfg_(cfg), t_(t0), y_(y0), k1_(f(t0, y0)), h_(std::min(cfg.h_init, cfg.h_max))
    {
        if (!y0.all_finite()) {
            throw NonFiniteState("initial state is not finite", t0);
        }
    }

    double time() const noexcept { return t_; }
    const StateVector& state() const noexcept { return y_; }

    /// Advances to exactly t_end; on_accept(t, y) is called after every accepted step.
    template <typename OnAccept>
    void advance_to(double t_end, OnAccept&& on_accept)
    {
        while (t_ < t_end) {
            if (++steps_ > cfg_.max_steps) {
                throw StepBudgetExceeded("integrator step budget of " +
                                             std::to_string(cfg_.max_steps) + " exceeded",
                                         t_);
            }
            const double remaining = t_end - t_;
            const bool last = h_ >= remaining;
            const double h = last ? remaining : h_;
            if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t_)) {
                throw StepBudgetExceeded("step size underflow", t_);
            }

            StepResult r = dopri_step(f_, t_, y_, k1_, h);
            const double err = error_norm(r, y_, cfg_);
            if (!std::isfinite(err)) {
                h_ = h * kMinFactor;
                continue;
            }
            const double fac11 = std::pow(err, kExpo);
            if (err <= 1.0) {
                if (!r.y.all_finite()) {
                    throw NonFiniteState("state became non-finite", t_);
                }
                double fac = fac11 / std::pow(err_old_, kBeta);
                fac = std::clamp(fac / kSafety, 1.0 / kMaxFactor, 1.0 / kMinFactor);
                err_old_ = std::max(err, 1e-4);
                t_ = last ? t_end : t_ + h;
                y_ = r.y;
                k1_ = r.k7;
                // Keep the controller's proposal when the step was shortened to hit t_end.
                const double proposal = std::min(h / fac, cfg_.h_max);
                h_ = last ? std::max(proposal, h_) : proposal;
                h_ = std::min(h_, cfg_.h_max);
                on_accept(t_, y_);
            } else {
                h_ = h / std::min(1.0 / kMinFactor, fac11 / kSafety);
            }
        }
    }

private:
    const RhsFunction& f_;
    IntegratorConfig cfg_;
    double t_;
    StateVector y_;
    StateVector k1_;
    double h_;
    double err_old_ = 1e-4;
    long steps_ = 0;
};

} // namespace

void IntegratorConfig::validate() const
{
    if (!(rtol > 0.0) || !(atol > 0.0)) {
        throw ConfigError("integrator tolerances must be positive");
    }
    if (!(h_init > 0.0) || !(h_init <= h_max)) {
        throw ConfigError("integrator steps must satisfy 0 < h_init <= h_max");
    }
    if (max_steps < 1) {
        throw ConfigError("integrator max_steps must be at least 1");
    }
}

Trajectory integrate_adaptive(const RhsFunction& f, const StateVector& y0, double t0, double t1,
                              const IntegratorConfig& cfg)
{
    cfg.validate();
    if (!(t1 > t0)) {
        throw DomainError("integration interval must satisfy t1 > t0");
    }
    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(y0);
    Driver driver(f, y0, t0, cfg);
    driver.advance_to(t1, [&](double t, const StateVector& y) {
        traj.times.push_back(t);
        traj.states.push_back(y);
    });
    return traj;
}

Trajectory integrate_at(const RhsFunction& f, const StateVector& y0,
                        std::span<const double> sample_times, const IntegratorConfig& cfg)
{
    cfg.validate();
    if (sample_times.empty()) {
        throw DomainError("sample_times must not be empty");
    }
    for (std::size_t i = 1; i < sample_times.size(); ++i) {
        if (!(sample_times[i] > sample_times[i - 1])) {
            throw DomainError("sample_times must be strictly increasing");
        }
    }
    Trajectory traj;
    traj.times.reserve(sample_times.size());
    traj.states.reserve(sample_times.size());
    traj.times.push_back(sample_times.front());
    traj.states.push_back(y0);
    Driver driver(f, y0, sample_times.front(), cfg);
    for (std::size_t i = 1; i < sample_times.size(); ++i) {
        driver.advance_to(sample_times[i], [](double, const StateVector&) {});
        traj.times.push_back(sample_times[i]);
        traj.states.push_back(driver.state());
    }
    return traj;
}

StateVector integrate_fixed(const RhsFunction& f, const StateVector& y0, double t0, double t1,
                            long n_steps)
{
    if (n_steps < 1 || !(t1 > t0)) {
        throw DomainError("fixed-step integration needs n_steps >= 1 and t1 > t0");
    }
    const double h = (t1 - t0) / static_cast<double>(n_steps);
    StateVector y = y0;
    StateVector k1 = f(t0, y);
    for (long i = 0; i < n_steps; ++i) {
        const double t = t0 + static_cast<double>(i) * h;
        StepResult r = dopri_step(f, t, y, k1, h);
        y = r.y;
        k1 = r.k7;
    }
    return y;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::string& metadata)
{
    write_metadata_line(out, metadata);
    std::vector<std::string> row;
    row.emplace_back("t");
    for (auto name : kCompartmentNames) {
        row.emplace_back(name);
    }
    write_csv_row(out, row);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        row.clear();
        row.push_back(format_double(traj.times[k]));
        for (double v : traj.states[k].values) {
            row.push_back(format_double(v));
        }
        write_csv_row(out, row);
    }
}

Trajectory read_trajectory_csv(std::istream& in)
{
    const CsvTable table = read_csv(in);
    const std::size_t t_col = table.column("t");
    std::array<std::size_t, N> cols{};
    for (std::size_t i = 0; i < N; ++i) {
        cols[i] = table.column(kCompartmentNames[i]);
    }
    Trajectory traj;
    for (const auto& row : table.rows) {
        traj.times.push_back(parse_double(row[t_col]));
        StateVector y;
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = parse_double(row[cols[i]]);
        }
        traj.states.push_back(y);
    }
    return traj;
}

} // namespace rabies
