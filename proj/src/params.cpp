#include "rabies/params.hpp"

#include <cmath>

#include "rabies/errors.hpp"

namespace rabies {

namespace {

const ParamField* find_field(std::string_view name) noexcept
{
    for (const auto& f : kParamFields) {
        if (f.name == name) {
            return &f;
        }
    }
    return nullptr;
}

bool is_strictly_positive_field(std::string_view name) noexcept
{
    return name == "mu1" || name == "mu2" || name == "mu3" || name == "mu4" || name == "c";
}

} // namespace

Params default_params() noexcept
{
    Params p;
    p.theta1 = 2000.0;
    p.tau1 = 0.0004;
    p.tau2 = 0.0004;
    p.tau3 = 0.0003;
    p.beta1 = 1.0 / 6.0;
    p.beta2 = 0.54;
    p.beta3 = 1.0;
    p.mu1 = 0.0142;
    p.sigma1 = 1.0;
    p.theta2 = 1000.0;
    p.kappa1 = 0.00006;
    p.kappa2 = 0.00005;
    p.kappa3 = 0.00001;
    p.gamma = 1.0 / 6.0;
    p.sigma2 = 0.09;
    p.mu2 = 0.067;
    p.theta3 = 1200.0;
    p.psi1 = 0.0004;
    p.psi2 = 0.0004;
    p.psi3 = 0.0003;
    p.mu3 = 0.067;
    p.sigma3 = 0.08;
    p.gamma1 = 1.0 / 6.0;
    p.gamma2 = 0.09;
    p.gamma3 = 0.05;
    p.nu1 = 0.001;
    p.nu2 = 0.006;
    p.nu3 = 0.001;
    p.mu4 = 0.08;
    p.rho1 = 10.0;
    p.rho2 = 8.0;
    p.rho3 = 15.0;
    p.c = 0.003;
    return p;
}

void validate(const Params& p)
{
    for (const auto& f : kParamFields) {
        const double v = p.*f.member;
        if (!std::isfinite(v)) {
            throw DomainError("parameter '" + std::string(f.name) + "' is not finite");
        }
        if (is_strictly_positive_field(f.name) ? !(v > 0.0) : v < 0.0) {
            throw DomainError("parameter '" + std::string(f.name) + "' out of range: " +
                              std::to_string(v));
        }
    }
}

bool is_param_name(std::string_view name) noexcept { return find_field(name) != nullptr; }

double get_param(const Params& p, std::string_view name)
{
    const auto* f = find_field(name);
    if (f == nullptr) {
        throw ConfigError("unknown parameter '" + std::string(name) + "'");
    }
    return p.*(f->member);
}

void set_param(Params& p, std::string_view name, double value)
{
    const auto* f = find_field(name);
    if (f == nullptr) {
        throw ConfigError("unknown parameter '" + std::string(name) + "'");
    }
    p.*(f->member) = value;
}

Params scale_contact_rates(const Params& p, double factor)
{
    Params out = p;
    for (auto name : kContactRates) {
        set_param(out, name, get_param(p, name) * factor);
    }
    return out;
}

nlohmann::json params_to_json(const Params& p)
{
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& f : kParamFields) {
        doc[std::string(f.name)] = p.*f.member;
    }
    return doc;
}

Params params_from_json(const nlohmann::json& doc, const Params& base)
{
    if (!doc.is_object()) {
        throw ConfigError("parameter document must be an object");
    }
    Params p = base;
    for (const auto& [key, value] : doc.items()) {
        if (!is_param_name(key)) {
            throw ConfigError("unknown parameter '" + key + "'");
        }
        if (!value.is_number()) {
            throw ConfigError("parameter '" + key + "' must be a number");
        }
        set_param(p, key, value.get<double>());
    }
    return p;
}

} // namespace rabies
