#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rabies/model.hpp"
#include "rabies/state.hpp"

namespace rabies {

struct IntegratorConfig {
    double rtol = 1e-8;
    double atol = 1e-8;
    double h_init = 1e-3;
    double h_max = 10.0;
    long max_steps = 1'000'000;

    /// Throws ConfigError if any field is out of range.
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;

    std::size_t size() const noexcept { return times.size(); }
    const StateVector& back() const { return states.back(); }
};

/// Dormand-Prince 5(4) with PI step-size control. The trajectory holds every
/// accepted step; t0 and t1 are hit exactly and the first state is y0 unchanged.
Trajectory integrate_adaptive(const RhsFunction& f, const StateVector& y0, double t0, double t1,
                              const IntegratorConfig& cfg = {});

/// Same scheme as integrate_adaptive, but steps are clipped to land on each
/// requested sample time, so the result holds exactly one state per sample.
Trajectory integrate_at(const RhsFunction& f, const StateVector& y0,
                        std::span<const double> sample_times, const IntegratorConfig& cfg = {});

/// Fixed-step fifth-order Dormand-Prince solution; used for order verification.
StateVector integrate_fixed(const RhsFunction& f, const StateVector& y0, double t0, double t1,
                            long n_steps);

/// CSV with header `t,S_H,...,M`, one row per sample. A non-empty metadata
/// string is written first as a `# ` comment line.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::string& metadata = {});

/// Inverse of write_trajectory_csv; comment lines are skipped.
Trajectory read_trajectory_csv(std::istream& in);

} // namespace rabies
