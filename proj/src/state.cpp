#include "rabies/state.hpp"

#include <algorithm>
#include <cmath>

namespace rabies {

std::optional<Compartment> compartment_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kNumCompartments; ++i) {
        if (kCompartmentNames[i] == name) {
            return static_cast<Compartment>(i);
        }
    }
    return std::nullopt;
}

bool StateVector::all_finite() const noexcept
{
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double StateVector::max_abs() const noexcept
{
    double out = 0.0;
    for (double v : values) {
        out = std::max(out, std::abs(v));
    }
    return out;
}

PopulationTotals population_totals(const StateVector& s) noexcept
{
    return {s.s_h() + s.e_h() + s.i_h() + s.r_h(),
            s.s_f() + s.e_f() + s.i_f(),
            s.s_d() + s.e_d() + s.i_d() + s.r_d()};
}

StateVector reference_initial_condition() noexcept
{
    StateVector y;
    y[Compartment::SH] = 142000.0;
    y[Compartment::EH] = 40.0;
    y[Compartment::SF] = 12500.0;
    y[Compartment::EF] = 20.0;
    y[Compartment::SD] = 15000.0;
    y[Compartment::ED] = 25.0;
    y[Compartment::M] = 90.0;
    return y;
}

} // namespace rabies
