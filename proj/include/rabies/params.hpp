#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "json.hpp"

namespace rabies {

/// Model parameters. Rates are per year; c shares the units of the M compartment.
struct Params {
    // humans
    double theta1 = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double tau3 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double mu1 = 0.0;
    double sigma1 = 0.0;
    // free-range dogs
    double theta2 = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
    double gamma = 0.0;
    double sigma2 = 0.0;
    double mu2 = 0.0;
    // domestic dogs
    double theta3 = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
    double psi3 = 0.0;
    double mu3 = 0.0;
    double sigma3 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;
    // environment
    double nu1 = 0.0;
    double nu2 = 0.0;
    double nu3 = 0.0;
    double mu4 = 0.0;
    // deterrence (dimensionless)
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.0;
    // half-saturation concentration
    double c = 0.0;

    friend bool operator==(const Params&, const Params&) = default;
};

struct ParamField {
    std::string_view name;
    double Params::*member;
};

inline constexpr std::size_t kNumParams = 33;

/// Every parameter with its key, in table order.
inline constexpr std::array<ParamField, kNumParams> kParamFields = {{
    {"theta1", &Params::theta1}, {"tau1", &Params::tau1},     {"tau2", &Params::tau2},
    {"tau3", &Params::tau3},     {"beta1", &Params::beta1},   {"beta2", &Params::beta2},
    {"beta3", &Params::beta3},   {"mu1", &Params::mu1},       {"sigma1", &Params::sigma1},
    {"theta2", &Params::theta2}, {"kappa1", &Params::kappa1}, {"kappa2", &Params::kappa2},
    {"kappa3", &Params::kappa3}, {"gamma", &Params::gamma},   {"sigma2", &Params::sigma2},
    {"mu2", &Params::mu2},       {"theta3", &Params::theta3}, {"psi1", &Params::psi1},
    {"psi2", &Params::psi2},     {"psi3", &Params::psi3},     {"mu3", &Params::mu3},
    {"sigma3", &Params::sigma3}, {"gamma1", &Params::gamma1}, {"gamma2", &Params::gamma2},
    {"gamma3", &Params::gamma3}, {"nu1", &Params::nu1},       {"nu2", &Params::nu2},
    {"nu3", &Params::nu3},       {"mu4", &Params::mu4},       {"rho1", &Params::rho1},
    {"rho2", &Params::rho2},     {"rho3", &Params::rho3},     {"c", &Params::c},
}};

/// The nine transmission (contact) rates.
inline constexpr std::array<std::string_view, 9> kContactRates = {
    "tau1", "tau2", "tau3", "kappa1", "kappa2", "kappa3", "psi1", "psi2", "psi3"};

/// Reference point values; ranged entries (tau3, beta2, kappa3) take the lower bound.
Params default_params() noexcept;

/// Throws DomainError when a death/removal rate or c is not strictly positive,
/// any other field is negative, or any field is non-finite.
void validate(const Params& p);

bool is_param_name(std::string_view name) noexcept;

/// Throws ConfigError on an unknown name.
double get_param(const Params& p, std::string_view name);
void set_param(Params& p, std::string_view name, double value);

/// Copy of p with every contact rate multiplied by factor.
Params scale_contact_rates(const Params& p, double factor);

nlohmann::json params_to_json(const Params& p);

/// Reads keys over a base set. Unknown keys and non-numeric values throw ConfigError.
Params params_from_json(const nlohmann::json& doc, const Params& base = default_params());

} // namespace rabies
