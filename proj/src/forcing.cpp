#include "rabies/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rabies/errors.hpp"

namespace rabies {

void ForcingConfig::validate() const
{
    if (!(amplitude >= 0.0 && amplitude <= 1.0)) {
        throw ConfigError("forcing amplitude must lie in [0, 1]");
    }
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw ConfigError("forcing period must be positive");
    }
    if (!std::isfinite(phase)) {
        throw ConfigError("forcing phase must be finite");
    }
    for (const auto& t : targets) {
        if (std::find(kForcibleRates.begin(), kForcibleRates.end(), t) == kForcibleRates.end()) {
            throw ConfigError("'" + t + "' is not a forcible rate");
        }
    }
}

ForcingConfig ForcingConfig::all_rates(double amplitude, double period, double phase)
{
    ForcingConfig cfg;
    cfg.amplitude = amplitude;
    cfg.period = period;
    cfg.phase = phase;
    cfg.targets.assign(kForcibleRates.begin(), kForcibleRates.end());
    cfg.validate();
    return cfg;
}

double modulation(double amplitude, double cycle_fraction, double phase) noexcept
{
    return 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * cycle_fraction + phase);
}

double modulation_factor(const ForcingConfig& cfg, double t) noexcept
{
    double reduced = std::fmod(t, cfg.period);
    if (reduced < 0.0) {
        reduced += cfg.period;
    }
    return modulation(cfg.amplitude, reduced / cfg.period, cfg.phase);
}

double periodic_rate(double mean, const ForcingConfig& cfg, double t)
{
    if (!(mean >= 0.0)) {
        throw DomainError("mean rate must be non-negative");
    }
    return mean * modulation_factor(cfg, t);
}

double bite_incidence(double beta_mean, double amplitude, double cycle_fraction, double phase,
                      double s, double i)
{
    if (beta_mean < 0.0 || s < 0.0 || i < 0.0 || amplitude < 0.0 || amplitude > 1.0) {
        throw DomainError("bite incidence needs non-negative inputs and amplitude <= 1");
    }
    return beta_mean * modulation(amplitude, cycle_fraction, phase) * s * i;
}

Params forced_params(const Params& base, const ForcingConfig& cfg, double t)
{
    if (cfg.targets.empty() || cfg.amplitude == 0.0) {
        return base;
    }
    const double factor = modulation_factor(cfg, t);
    Params p = base;
    for (const auto& name : cfg.targets) {
        set_param(p, name, get_param(base, name) * factor);
    }
    return p;
}

RhsFunction forced_rhs(const Params& base, const ForcingConfig& cfg)
{
    cfg.validate();
    std::vector<double Params::*> members;
    for (const auto& name : cfg.targets) {
        for (const auto& field : kParamFields) {
            if (field.name == name) {
                members.push_back(field.member);
            }
        }
    }
    return [base, cfg, members](double t, const StateVector& y) {
        if (members.empty() || cfg.amplitude == 0.0) {
            return rhs(t, y, base);
        }
        const double factor = modulation_factor(cfg, t);
        Params p = base;
        for (auto member : members) {
            p.*member = base.*member * factor;
        }
        return rhs(t, y, p);
    };
}

} // namespace rabies
