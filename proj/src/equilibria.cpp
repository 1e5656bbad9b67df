#include "rabies/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "rabies/errors.hpp"

namespace rabies {

namespace {

constexpr std::size_t N = kNumCompartments;

Eigen::VectorXd to_eigen(const StateVector& y)
{
    Eigen::VectorXd v(N);
    for (std::size_t i = 0; i < N; ++i) {
        v(static_cast<Eigen::Index>(i)) = y[i];
    }
    return v;
}

std::vector<std::complex<double>> eigenvalues_of(const Eigen::MatrixXd& m)
{
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw Error("eigenvalue iteration did not converge");
    }
    const auto& ev = solver.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

bool any_infected_positive(const StateVector& y, double threshold)
{
    return std::any_of(kInfectedCompartments.begin(), kInfectedCompartments.end(),
                       [&](Compartment c) { return y[c] > threshold; });
}

} // namespace

std::string_view to_string(EquilibriumKind kind) noexcept
{
    return kind == EquilibriumKind::DiseaseFree ? "disease-free" : "endemic";
}

std::string_view to_string(Classification c) noexcept
{
    switch (c) {
    case Classification::LocallyStable:
        return "locally-stable";
    case Classification::Unstable:
        return "unstable";
    case Classification::Inconclusive:
        break;
    }
    return "inconclusive";
}

double equilibrium_residual(const StateVector& y, const Params& p)
{
    return rhs(0.0, y, p).max_abs() / std::max(1.0, y.max_abs());
}

EquilibriumResult disease_free_equilibrium(const Params& p)
{
    EquilibriumResult out;
    out.state[Compartment::SH] = p.theta1 / p.mu1;
    out.state[Compartment::SF] = p.theta2 / p.mu2;
    out.state[Compartment::SD] = p.theta3 / p.mu3;
    out.residual_norm = equilibrium_residual(out.state, p);
    out.kind = EquilibriumKind::DiseaseFree;
    out.converged = true;
    return out;
}

InvariantBounds invariant_bounds(const Params& p)
{
    InvariantBounds b;
    b.n_h_max = p.theta1 / p.mu1;
    b.n_f_max = p.theta2 / p.mu2;
    b.n_d_max = p.theta3 / p.mu3;
    b.m_max = (p.nu1 * b.n_h_max + p.nu2 * b.n_f_max + p.nu3 * b.n_d_max) / p.mu4;
    return b;
}

Eigen::MatrixXd numeric_jacobian(const RhsFunction& f, double t, const StateVector& y)
{
    Eigen::MatrixXd jac(N, N);
    for (std::size_t j = 0; j < N; ++j) {
        const double h = 1e-7 * std::max(std::abs(y[j]), 1.0);
        StateVector up = y;
        StateVector down = y;
        up[j] += h;
        down[j] -= h;
        const StateVector fu = f(t, up);
        const StateVector fd = f(t, down);
        const double step = up[j] - down[j];
        for (std::size_t i = 0; i < N; ++i) {
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (fu[i] - fd[i]) / step;
        }
    }
    return jac;
}

Matrix12 jacobian(const StateVector& y, const Params& p)
{
    return numeric_jacobian(make_rhs(p), 0.0, y);
}

Matrix12 dfe_jacobian(const Params& p, FMode mode)
{
    using C = Compartment;
    auto at = [](Matrix12& m, C row, C col) -> double& {
        return m(static_cast<Eigen::Index>(index_of(row)), static_cast<Eigen::Index>(index_of(col)));
    };
    const double sh0 = p.theta1 / p.mu1;
    const double sf0 = p.theta2 / p.mu2;
    const double sd0 = p.theta3 / p.mu3;
    const double dom_from_if = p.psi1 * sd0 / (1.0 + p.rho1);
    const double dom_from_id = p.psi2 * sd0 / (1.0 + p.rho2);

    Matrix12 j = Matrix12::Zero();
    at(j, C::SH, C::SH) = -p.mu1;
    at(j, C::SH, C::RH) = p.beta3;
    at(j, C::SH, C::IF) = -p.tau1 * sh0;
    at(j, C::SH, C::ID) = -p.tau2 * sh0;
    at(j, C::EH, C::EH) = -(p.mu1 + p.beta1 + p.beta2);
    at(j, C::EH, C::IF) = p.tau1 * sh0;
    at(j, C::EH, C::ID) = p.tau2 * sh0;
    at(j, C::IH, C::EH) = p.beta1;
    at(j, C::IH, C::IH) = -(p.sigma1 + p.mu1);
    at(j, C::RH, C::EH) = p.beta2;
    at(j, C::RH, C::RH) = -(p.beta3 + p.mu1);

    at(j, C::SF, C::SF) = -p.mu2;
    at(j, C::SF, C::IF) = -p.kappa1 * sf0;
    at(j, C::SF, C::ID) = -p.kappa2 * sf0;
    at(j, C::EF, C::EF) = -(p.mu2 + p.gamma);
    at(j, C::EF, C::IF) = p.kappa1 * sf0;
    at(j, C::EF, C::ID) = p.kappa2 * sf0;
    at(j, C::IF, C::EF) = p.gamma;
    at(j, C::IF, C::IF) = -(p.mu2 + p.sigma2);

    at(j, C::SD, C::SD) = -p.mu3;
    at(j, C::SD, C::IF) = -dom_from_if;
    at(j, C::SD, C::ID) = -dom_from_id;
    at(j, C::SD, C::RD) = p.gamma3;
    at(j, C::ED, C::ED) = -(p.mu3 + p.gamma1 + p.gamma2);
    at(j, C::ED, C::IF) = dom_from_if;
    at(j, C::ED, C::ID) = dom_from_id;
    at(j, C::ID, C::ED) = p.gamma1;
    at(j, C::ID, C::ID) = -(p.mu3 + p.sigma3);
    at(j, C::RD, C::ED) = p.gamma2;
    at(j, C::RD, C::RD) = -(p.mu3 + p.gamma3);

    at(j, C::M, C::IH) = p.nu1;
    at(j, C::M, C::IF) = p.nu2;
    at(j, C::M, C::ID) = p.nu3;
    at(j, C::M, C::M) = -p.mu4;

    if (mode == FMode::Corrected) {
        const double human_env = p.tau3 * sh0 / p.c;
        const double free_env = p.kappa3 * sf0 / p.c;
        const double dom_env = p.psi3 * sd0 / ((1.0 + p.rho3) * p.c);
        at(j, C::SH, C::M) = -human_env;
        at(j, C::EH, C::M) = human_env;
        at(j, C::SF, C::M) = -free_env;
        at(j, C::EF, C::M) = free_env;
        at(j, C::SD, C::M) = -dom_env;
        at(j, C::ED, C::M) = dom_env;
    }
    return j;
}

EquilibriumResult find_endemic_equilibrium(const Params& p, const StateVector& guess,
                                           const NewtonConfig& cfg)
{
    for (double v : guess.values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("Newton guess must be strictly positive and finite");
        }
    }
    const RhsFunction f = make_rhs(p);
    StateVector y = guess;
    double residual = equilibrium_residual(y, p);

    EquilibriumResult out;
    int iteration = 0;
    for (; iteration < cfg.max_iterations && !(residual < cfg.tol); ++iteration) {
        const Eigen::MatrixXd jac = numeric_jacobian(f, 0.0, y);
        const Eigen::VectorXd fx = to_eigen(f(0.0, y));
        const Eigen::VectorXd step = jac.fullPivLu().solve(-fx);
        if (!step.allFinite()) {
            throw NoConvergence("Newton step is not finite (singular Jacobian)");
        }
        double lambda = 1.0;
        StateVector trial = y;
        double trial_residual = residual;
        for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
            for (std::size_t i = 0; i < N; ++i) {
                trial[i] = y[i] + lambda * step(static_cast<Eigen::Index>(i));
            }
            trial_residual = equilibrium_residual(trial, p);
            if (trial_residual < residual) {
                break;
            }
            lambda *= 0.5;
        }
        if (!(trial_residual < residual)) {
            // No descent along the damped direction; accept the shortest step
            // only if it does not blow up, otherwise stop.
            if (!std::isfinite(trial_residual)) {
                throw NoConvergence("Newton iteration diverged");
            }
        }
        y = trial;
        residual = trial_residual;
    }

    out.state = y;
    out.residual_norm = residual;
    out.iterations = iteration;
    out.converged = residual < cfg.tol;
    if (!out.converged) {
        throw NoConvergence("Newton iteration stopped after " + std::to_string(iteration) +
                            " iterations with residual " + std::to_string(residual));
    }
    const double scale = std::max(1.0, y.max_abs());
    for (std::size_t i = 0; i < N; ++i) {
        if (y[i] < -cfg.tol * scale) {
            throw NegativeEquilibrium("Newton converged to a state with negative " +
                                      std::string(kCompartmentNames[i]) + " = " +
                                      std::to_string(y[i]));
        }
    }
    out.kind = any_infected_positive(y, cfg.tol * scale) ? EquilibriumKind::Endemic
                                                         : EquilibriumKind::DiseaseFree;
    return out;
}

RouthHurwitzResult routh_hurwitz_quartic(double c1, double c2, double c3, double c0)
{
    RouthHurwitzResult r;
    r.hurwitz_margin = c1 * c2 * c3 - c3 * c3 - c1 * c1 * c0;
    r.all_coefficients_positive = c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c0 > 0.0;
    r.satisfied = c1 > 0.0 && c3 > 0.0 && c0 > 0.0 && r.hurwitz_margin > 0.0;
    return r;
}

std::vector<std::complex<double>> quartic_roots(const QuarticCoefficients& q)
{
    Matrix4 companion = Matrix4::Zero();
    companion(0, 0) = -q.c1;
    companion(0, 1) = -q.c2;
    companion(0, 2) = -q.c3;
    companion(0, 3) = -q.c0;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(3, 2) = 1.0;
    return eigenvalues_of(companion);
}

Matrix4 reduced_dog_block(const Params& p)
{
    const Matrix12 j = dfe_jacobian(p, FMode::PaperLiteral);
    const std::array<Compartment, 4> idx = {Compartment::EF, Compartment::IF, Compartment::ED,
                                            Compartment::ID};
    Matrix4 block;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            block(r, c) = j(static_cast<Eigen::Index>(index_of(idx[r])),
                            static_cast<Eigen::Index>(index_of(idx[c])));
        }
    }
    return block;
}

QuarticCoefficients dog_block_coefficients(const Params& p)
{
    const double a4 = p.mu2 + p.gamma;
    const double a5 = p.mu2 + p.sigma2;
    const double a6 = p.mu3 + p.gamma1 + p.gamma2;
    const double a7 = p.mu3 + p.sigma3;
    const double b1 = p.kappa1 * p.theta2 / p.mu2;
    const double b2 = p.psi1 * p.theta3 / (p.mu3 * (1.0 + p.rho1));
    const double b3 = p.kappa2 * p.theta2 / p.mu2;
    const double b4 = p.psi2 * p.theta3 / (p.mu3 * (1.0 + p.rho2));
    const double g = p.gamma;
    const double g1 = p.gamma1;

    QuarticCoefficients q;
    q.c1 = a7 + a6 + a5 + a4;
    q.c2 = -g * b1 - g1 * b4 + a5 * a4 + a6 * a4 + a7 * a4 + a6 * a5 + a7 * a5 + a7 * a6;
    q.c3 = ((a6 + a7) * a5 - g1 * b4 + a7 * a6) * a4 + (-g1 * b4 + a7 * a6) * a5 -
           g * b1 * (a6 + a7);
    q.c0 = g * g1 * b1 * b4 - g * g1 * b2 * b3 - g1 * a4 * a5 * b4 - g * a6 * a7 * b1 +
           a4 * a5 * a6 * a7;
    return q;
}

MetzlerResult metzler_global_check(const Params& p, FMode mode)
{
    MetzlerResult r;
    const Matrix12 j = dfe_jacobian(p, mode);
    for (int a = 0; a < 5; ++a) {
        const auto row = static_cast<Eigen::Index>(index_of(kUninfectedCompartments[a]));
        for (int b = 0; b < 5; ++b) {
            r.g0(a, b) = j(row, static_cast<Eigen::Index>(index_of(kUninfectedCompartments[b])));
        }
        for (int b = 0; b < 7; ++b) {
            r.g1(a, b) = j(row, static_cast<Eigen::Index>(index_of(kInfectedCompartments[b])));
        }
    }
    r.g2 = build_f(p, mode) - build_v(p);

    for (const auto& ev : eigenvalues_of(r.g0)) {
        r.g0_eigenvalues.push_back(ev.real());
    }
    r.g0_negative = std::all_of(r.g0_eigenvalues.begin(), r.g0_eigenvalues.end(),
                                [](double v) { return v < 0.0; });
    r.g2_offdiag_nonnegative = true;
    for (int a = 0; a < 7; ++a) {
        for (int b = 0; b < 7; ++b) {
            if (a != b && r.g2(a, b) < 0.0) {
                r.g2_offdiag_nonnegative = false;
            }
        }
    }
    r.verdict = r.g0_negative && r.g2_offdiag_nonnegative;
    return r;
}

namespace {

Classification classify(double max_real_part, double scale)
{
    if (max_real_part < -1e-12 * scale) {
        return Classification::LocallyStable;
    }
    if (max_real_part > 1e-12 * scale) {
        return Classification::Unstable;
    }
    return Classification::Inconclusive;
}

double max_real(const std::vector<std::complex<double>>& ev)
{
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : ev) {
        m = std::max(m, z.real());
    }
    return m;
}

} // namespace

StabilityReport local_dfe_stability(const Params& p, FMode mode)
{
    StabilityReport r;
    r.mode = mode;
    const Matrix12 j = dfe_jacobian(p, mode);
    r.jacobian_eigenvalues = eigenvalues_of(j);
    r.max_real_part = max_real(r.jacobian_eigenvalues);

    r.rh_coefficients = dog_block_coefficients(p);
    const auto& q = r.rh_coefficients;
    r.routh_hurwitz = routh_hurwitz_quartic(q.c1, q.c2, q.c3, q.c0);
    r.quartic_roots = quartic_roots(q);
    const bool roots_negative = max_real(r.quartic_roots) < 0.0;
    r.rh_consistent = roots_negative == r.routh_hurwitz.satisfied;

    double scale = 0.0;
    for (const auto& z : r.jacobian_eigenvalues) {
        scale = std::max(scale, std::abs(z));
    }
    r.quartic_roots_in_spectrum = std::all_of(
        r.quartic_roots.begin(), r.quartic_roots.end(), [&](std::complex<double> root) {
            return std::any_of(r.jacobian_eigenvalues.begin(), r.jacobian_eigenvalues.end(),
                               [&](std::complex<double> ev) {
                                   return std::abs(ev - root) <= 1e-8 * std::max(1.0, scale);
                               });
        });

    r.metzler = metzler_global_check(p, mode);
    r.classification = classify(r.max_real_part, std::max(1.0, scale));
    return r;
}

Classification classify_equilibrium(const StateVector& y, const Params& p,
                                    std::vector<std::complex<double>>* eigenvalues)
{
    auto ev = eigenvalues_of(jacobian(y, p));
    double scale = 0.0;
    for (const auto& z : ev) {
        scale = std::max(scale, std::abs(z));
    }
    const Classification c = classify(max_real(ev), std::max(1.0, scale));
    if (eigenvalues != nullptr) {
        *eigenvalues = std::move(ev);
    }
    return c;
}

} // namespace rabies
