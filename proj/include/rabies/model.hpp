#pragma once

#include <functional>

#include "rabies/params.hpp"
#include "rabies/state.hpp"

namespace rabies {

/// Right-hand side signature shared by the integrator, forcing and fitting code.
using RhsFunction = std::function<StateVector(double t, const StateVector& y)>;

/// m / (m + c). Throws DomainError if m < 0 or c <= 0.
double environment_saturation(double m, double c);

/// Force of infection on susceptible humans.
double foi_human(const StateVector& y, const Params& p);
/// Force of infection on susceptible free-range dogs.
double foi_free_range(const StateVector& y, const Params& p);
/// Force of infection on susceptible domestic dogs; deterrence divides each source term.
double foi_domestic(const StateVector& y, const Params& p);

/// Time derivative of all twelve compartments. Autonomous: t is accepted for
/// signature compatibility with forced variants.
///
/// Unlike environment_saturation, the saturation term here is evaluated without
/// domain checks so that integrator stages and finite-difference probes that
/// step slightly below M = 0 still produce a finite derivative.
StateVector rhs(double t, const StateVector& y, const Params& p) noexcept;

/// Binds p into an RhsFunction.
RhsFunction make_rhs(const Params& p);

} // namespace rabies
