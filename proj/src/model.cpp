#include "rabies/model.hpp"

#include "rabies/errors.hpp"

namespace rabies {

namespace {

double saturation(double m, double c) noexcept { return m / (m + c); }

double chi_human(const StateVector& y, const Params& p) noexcept
{
    return (p.tau1 * y.i_f() + p.tau2 * y.i_d() + p.tau3 * saturation(y.m(), p.c)) * y.s_h();
}

double chi_free_range(const StateVector& y, const Params& p) noexcept
{
    return (p.kappa1 * y.i_f() + p.kappa2 * y.i_d() + p.kappa3 * saturation(y.m(), p.c)) *
           y.s_f();
}

double chi_domestic(const StateVector& y, const Params& p) noexcept
{
    return (p.psi1 * y.i_f() / (1.0 + p.rho1) + p.psi2 * y.i_d() / (1.0 + p.rho2) +
            p.psi3 * saturation(y.m(), p.c) / (1.0 + p.rho3)) *
           y.s_d();
}

} // namespace

double environment_saturation(double m, double c)
{
    if (!(c > 0.0)) {
        throw DomainError("saturation constant must be positive");
    }
    if (!(m >= 0.0)) {
        throw DomainError("environmental concentration must be non-negative");
    }
    return saturation(m, c);
}

double foi_human(const StateVector& y, const Params& p)
{
    environment_saturation(y.m(), p.c);
    return chi_human(y, p);
}

double foi_free_range(const StateVector& y, const Params& p)
{
    environment_saturation(y.m(), p.c);
    return chi_free_range(y, p);
}

double foi_domestic(const StateVector& y, const Params& p)
{
    environment_saturation(y.m(), p.c);
    return chi_domestic(y, p);
}

StateVector rhs(double /*t*/, const StateVector& y, const Params& p) noexcept
{
    const double chi1 = chi_human(y, p);
    const double chi2 = chi_free_range(y, p);
    const double chi3 = chi_domestic(y, p);

    StateVector dy;
    dy[Compartment::SH] = p.theta1 + p.beta3 * y.r_h() - p.mu1 * y.s_h() - chi1;
    dy[Compartment::EH] = chi1 - (p.mu1 + p.beta1 + p.beta2) * y.e_h();
    dy[Compartment::IH] = p.beta1 * y.e_h() - (p.sigma1 + p.mu1) * y.i_h();
    dy[Compartment::RH] = p.beta2 * y.e_h() - (p.beta3 + p.mu1) * y.r_h();

    dy[Compartment::SF] = p.theta2 - chi2 - p.mu2 * y.s_f();
    dy[Compartment::EF] = chi2 - (p.mu2 + p.gamma) * y.e_f();
    dy[Compartment::IF] = p.gamma * y.e_f() - (p.mu2 + p.sigma2) * y.i_f();

    dy[Compartment::SD] = p.theta3 - p.mu3 * y.s_d() - chi3 + p.gamma3 * y.r_d();
    dy[Compartment::ED] = chi3 - (p.mu3 + p.gamma1 + p.gamma2) * y.e_d();
    dy[Compartment::ID] = p.gamma1 * y.e_d() - (p.mu3 + p.sigma3) * y.i_d();
    dy[Compartment::RD] = p.gamma2 * y.e_d() - (p.mu3 + p.gamma3) * y.r_d();

    dy[Compartment::M] = (p.nu1 * y.i_h() + p.nu2 * y.i_f() + p.nu3 * y.i_d()) - p.mu4 * y.m();
    return dy;
}

RhsFunction make_rhs(const Params& p)
{
    return [p](double t, const StateVector& y) { return rhs(t, y, p); };
}

} // namespace rabies
