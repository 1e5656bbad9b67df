#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rabies/model.hpp"
#include "rabies/params.hpp"

namespace rabies {

/// Rates that may carry sinusoidal modulation.
inline constexpr std::array<std::string_view, 12> kForcibleRates = {
    "tau1", "tau2", "tau3", "kappa1", "kappa2", "kappa3",
    "psi1", "psi2", "psi3", "nu1",    "nu2",    "nu3"};

struct ForcingConfig {
    double amplitude = 0.0; ///< A in [0, 1]
    double period = 10.0;   ///< T in years
    double phase = 0.0;     ///< radians
    std::vector<std::string> targets;

    /// Throws ConfigError unless 0 <= A <= 1, T > 0, phase finite and every
    /// target is a forcible rate.
    void validate() const;

    /// Validated config targeting all twelve forcible rates.
    static ForcingConfig all_rates(double amplitude, double period = 10.0, double phase = 0.0);
};

/// 1 + A sin(2 pi f + phase). Shared by the forced rates and the bite-incidence formula.
double modulation(double amplitude, double cycle_fraction, double phase) noexcept;

/// 1 + A sin(2 pi t / T + phase), with t reduced modulo T first so the factor
/// repeats exactly whenever t + T is representable.
double modulation_factor(const ForcingConfig& cfg, double t) noexcept;

/// mean * modulation_factor(cfg, t)
double periodic_rate(double mean, const ForcingConfig& cfg, double t);

/// beta_mean (1 + A sin(2 pi f + phase)) s i
double bite_incidence(double beta_mean, double amplitude, double cycle_fraction, double phase,
                      double s, double i);

/// Parameters in effect at time t.
Params forced_params(const Params& base, const ForcingConfig& cfg, double t);

/// Model right-hand side with every targeted rate modulated at evaluation time.
RhsFunction forced_rhs(const Params& base, const ForcingConfig& cfg);

} // namespace rabies
