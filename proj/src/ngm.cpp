#include "rabies/ngm.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "rabies/errors.hpp"

namespace rabies {

namespace {

/// Forward-mode dual number: value plus one directional derivative.
struct Dual {
    double v = 0.0;
    double d = 0.0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
Dual operator*(double s, Dual a) { return {s * a.v, s * a.d}; }
Dual operator+(double s, Dual a) { return {s + a.v, a.d}; }
double value_of(double x) { return x; }
double value_of(Dual x) { return x.v; }
Dual sqrt_of(Dual a)
{
    const double r = std::sqrt(a.v);
    return {r, r > 0.0 ? a.d / (2.0 * r) : 0.0};
}
double sqrt_of(double a) { return std::sqrt(a); }

/// The parameters that enter the dominant 2x2 block.
template <typename T>
struct BlockInputs {
    T theta2, theta3, kappa1, kappa2, psi1, psi2, rho1, rho2;
    T gamma, gamma1, gamma2, mu2, mu3, sigma2, sigma3;
};


template <typename T>
T dominant_root(T r33, T r35, T r53, T r55)
{
    const T radicand = r33 * (r33 - 2.0 * r55) + 4.0 * r35 * r53 + r55 * r55;
    const double scale = std::abs(value_of(r33)) + std::abs(value_of(r55)) +
                         std::sqrt(std::abs(4.0 * value_of(r35) * value_of(r53)));
    if (value_of(radicand) < -1e-12 * scale * scale) {
        throw NegativeDiscriminant("negative discriminant in closed-form R0");
    }
    const T clamped = value_of(radicand) < 0.0 ? T{} : radicand;
    return 0.5 * ((r55 + r33) + sqrt_of(clamped));
}

template <typename T>
T block_r0(const BlockInputs<T>& q)
{
    const T free_exposed = q.mu2 + q.gamma;
    const T free_infectious = q.mu2 + q.sigma2;
    const T dom_exposed = q.mu3 + q.gamma1 + q.gamma2;
    const T dom_infectious = q.mu3 + q.sigma3;
    const T r33 = q.kappa1 * q.theta2 * q.gamma / (q.mu2 * free_exposed * free_infectious);
    const T r35 = q.kappa2 * q.theta2 * q.gamma1 / (q.mu2 * dom_exposed * dom_infectious);
    const T r53 = q.psi1 * q.theta3 * q.gamma /
                  ((1.0 + q.rho1) * q.mu3 * free_exposed * free_infectious);
    const T r55 = q.psi2 * q.theta3 * q.gamma1 /
                  ((1.0 + q.rho2) * q.mu3 * dom_exposed * dom_infectious);
    return dominant_root(r33, r35, r53, r55);
}

BlockInputs<Dual> seeded_inputs(const Params& p, std::string_view seed)
{
    auto dual = [&](std::string_view name) {
        return Dual{get_param(p, name), name == seed ? 1.0 : 0.0};
    };
    return {dual("theta2"), dual("theta3"), dual("kappa1"), dual("kappa2"), dual("psi1"),
            dual("psi2"),   dual("rho1"),   dual("rho2"),   dual("gamma"),  dual("gamma1"),
            dual("gamma2"), dual("mu2"),    dual("mu3"),    dual("sigma2"), dual("sigma3")};
}

double r0_for_mode(const Params& p, FMode mode)
{
    return spectral_radius(next_generation_matrix(p, mode).ngm);
}

bool differs(double a, double b)
{
    return std::abs(a - b) > 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace

std::string_view to_string(FMode mode) noexcept
{
    return mode == FMode::PaperLiteral ? "paper-literal" : "corrected";
}

FMode fmode_from_string(std::string_view text)
{
    if (text == "paper-literal") {
        return FMode::PaperLiteral;
    }
    if (text == "corrected") {
        return FMode::Corrected;
    }
    throw ConfigError("unknown mode '" + std::string(text) +
                      "' (expected paper-literal or corrected)");
}

std::array<double, 12> REntries::as_array() const noexcept
{
    return {r13, r14, r15, r16, r33, r34, r35, r36, r53, r54, r55, r56};
}

Matrix7 build_f(const Params& p, FMode mode)
{
    const double sh0 = p.theta1 / p.mu1;
    const double sf0 = p.theta2 / p.mu2;
    const double sd0 = p.theta3 / p.mu3;
    Matrix7 f = Matrix7::Zero();
    // columns: E_H, I_H, E_F, I_F, E_D, I_D, M
    f(0, 3) = p.tau1 * sh0;
    f(0, 5) = p.tau2 * sh0;
    f(2, 3) = p.kappa1 * sf0;
    f(2, 5) = p.kappa2 * sf0;
    f(4, 3) = p.psi1 * sd0 / (1.0 + p.rho1);
    f(4, 5) = p.psi2 * sd0 / (1.0 + p.rho2);
    if (mode == FMode::Corrected) {
        f(0, 6) = p.tau3 * sh0 / p.c;
        f(2, 6) = p.kappa3 * sf0 / p.c;
        f(4, 6) = p.psi3 * sd0 / ((1.0 + p.rho3) * p.c);
    }
    return f;
}

Matrix7 build_v(const Params& p)
{
    Matrix7 v = Matrix7::Zero();
    v(0, 0) = p.mu1 + p.beta1 + p.beta2;
    v(1, 0) = -p.beta1;
    v(1, 1) = p.sigma1 + p.mu1;
    v(2, 2) = p.mu2 + p.gamma;
    v(3, 2) = -p.gamma;
    v(3, 3) = p.mu2 + p.sigma2;
    v(4, 4) = p.mu3 + p.gamma1 + p.gamma2;
    v(5, 4) = -p.gamma1;
    v(5, 5) = p.mu3 + p.sigma3;
    v(6, 1) = -p.nu1;
    v(6, 3) = -p.nu2;
    v(6, 5) = -p.nu3;
    v(6, 6) = p.mu4;
    return v;
}

double spectral_radius(const Eigen::MatrixXd& m)
{
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw Error("eigenvalue iteration did not converge");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

NgmDecomposition next_generation_matrix(const Params& p, FMode mode)
{
    NgmDecomposition out;
    out.mode = mode;
    out.f_matrix = build_f(p, mode);
    out.v_matrix = build_v(p);
    for (int i = 0; i < 7; ++i) {
        if (out.v_matrix(i, i) == 0.0) {
            throw SingularTransfer("transfer matrix has a zero diagonal entry at row " +
                                   std::to_string(i + 1));
        }
    }
    out.v_inverse = out.v_matrix.inverse();
    out.ngm = out.f_matrix * out.v_inverse;
    const Matrix7& k = out.ngm;
    out.r_entries = {k(0, 2), k(0, 3), k(0, 4), k(0, 5), k(2, 2), k(2, 3),
                     k(2, 4), k(2, 5), k(4, 2), k(4, 3), k(4, 4), k(4, 5)};
    out.transcribed_entries = r_entries_transcribed(p);
    const auto computed = out.r_entries.as_array();
    const auto printed = out.transcribed_entries.as_array();
    for (std::size_t i = 0; i < computed.size(); ++i) {
        if (differs(computed[i], printed[i])) {
            out.discrepancies.emplace_back(REntries::names[i]);
        }
    }
    out.r0 = spectral_radius(out.ngm);
    return out;
}

REntries r_entries_closed_form(const Params& p)
{
    const double free_exposed = p.mu2 + p.gamma;
    const double free_infectious = p.mu2 + p.sigma2;
    const double dom_exposed = p.mu3 + p.gamma1 + p.gamma2;
    const double dom_infectious = p.mu3 + p.sigma3;
    const double human = p.theta1 / p.mu1;
    const double free_dogs = p.theta2 / p.mu2;
    const double dom_dogs = p.theta3 / p.mu3;
    const double from_if = p.gamma / (free_exposed * free_infectious);
    const double from_id = p.gamma1 / (dom_exposed * dom_infectious);

    REntries r;
    r.r13 = p.tau1 * human * from_if;
    r.r14 = p.tau1 * human / free_infectious;
    r.r15 = p.tau2 * human * from_id;
    r.r16 = p.tau2 * human / dom_infectious;
    r.r33 = p.kappa1 * free_dogs * from_if;
    r.r34 = p.kappa1 * free_dogs / free_infectious;
    r.r35 = p.kappa2 * free_dogs * from_id;
    r.r36 = p.kappa2 * free_dogs / dom_infectious;
    r.r53 = p.psi1 * dom_dogs / (1.0 + p.rho1) * from_if;
    r.r54 = p.psi1 * dom_dogs / ((1.0 + p.rho1) * free_infectious);
    r.r55 = p.psi2 * dom_dogs / (1.0 + p.rho2) * from_id;
    r.r56 = p.psi2 * dom_dogs / ((1.0 + p.rho2) * dom_infectious);
    return r;
}

REntries r_entries_transcribed(const Params& p)
{
    const double free_exposed = p.mu2 + p.gamma;
    const double free_infectious = p.mu2 + p.sigma2;
    const double dom_exposed = p.mu3 + p.gamma1 + p.gamma2;
    const double dom_infectious = p.mu3 + p.sigma3;

    REntries r;
    r.r13 = p.tau1 * p.theta1 * p.gamma / (p.mu1 * free_exposed * free_infectious);
    r.r14 = p.tau1 * p.theta1 / (p.mu1 * free_infectious);
    r.r15 = p.tau2 * p.theta1 * p.gamma / (p.mu1 * dom_exposed * dom_infectious);
    r.r16 = p.tau2 * p.theta1 / (p.mu1 * dom_infectious);
    r.r33 = p.kappa1 * p.theta2 * p.gamma / (p.mu2 * free_exposed * free_infectious);
    r.r34 = p.kappa1 * p.theta2 / (p.mu2 * free_infectious);
    r.r35 = p.kappa1 * p.theta2 * p.gamma / (p.mu2 * dom_exposed * dom_infectious);
    r.r36 = p.kappa1 * p.theta2 / (p.mu2 * dom_infectious);
    r.r53 = p.psi1 * p.theta3 * p.gamma / ((1.0 + p.rho1) * free_exposed * free_infectious * p.mu3);
    r.r54 = p.psi1 * p.theta3 / ((1.0 + p.rho1) * p.mu3 * free_infectious);
    r.r55 = p.psi2 * p.theta3 * p.gamma / ((1.0 + p.rho2) * dom_exposed * dom_infectious * p.mu3);
    r.r56 = p.psi2 * p.theta3 / ((1.0 + p.rho2) * p.mu3 * dom_infectious);
    return r;
}

double r0_closed_form(const Params& p)
{
    const REntries r = r_entries_closed_form(p);
    return dominant_root(r.r33, r.r35, r.r53, r.r55);
}

double r0_closed_form_transcribed(const Params& p)
{
    const REntries r = r_entries_transcribed(p);
    return dominant_root(r.r33, r.r35, r.r53, r.r55);
}

std::string_view to_string(SensitivityMethod method) noexcept
{
    return method == SensitivityMethod::AnalyticClosedForm ? "analytic-on-closed-form"
                                                           : "central-finite-difference";
}

double sensitivity_index(const Params& p, std::string_view name, SensitivityMethod method,
                         FMode mode)
{
    const double value = get_param(p, name);
    if (value == 0.0) {
        throw ZeroParameter("sensitivity index undefined for zero-valued parameter '" +
                            std::string(name) + "'");
    }

    if (method == SensitivityMethod::AnalyticClosedForm) {
        if (mode != FMode::PaperLiteral) {
            throw ConfigError("analytic sensitivity is only defined for the paper-literal closed form");
        }
        const Dual r0 = block_r0(seeded_inputs(p, name));
        if (r0.v == 0.0) {
            throw ZeroR0("sensitivity index undefined when R0 = 0");
        }
        return r0.d * value / r0.v;
    }

    const double r0 = r0_for_mode(p, mode);
    if (r0 == 0.0) {
        throw ZeroR0("sensitivity index undefined when R0 = 0");
    }
    const double h = 1e-6 * std::abs(value);
    Params up = p;
    Params down = p;
    set_param(up, name, value + h);
    set_param(down, name, value - h);
    const double derivative = (r0_for_mode(up, mode) - r0_for_mode(down, mode)) / (2.0 * h);
    return derivative * value / r0;
}

double SensitivityReport::at(std::string_view name) const
{
    for (const auto& e : entries) {
        if (e.name == name) {
            return e.index;
        }
    }
    throw ConfigError("no sensitivity entry for '" + std::string(name) + "'");
}

SensitivityReport sensitivity_table(const Params& p, SensitivityMethod method, FMode mode)
{
    SensitivityReport report;
    report.method = method;
    for (const auto& ref : kReferenceSensitivity) {
        report.entries.push_back(
            {std::string(ref.name), sensitivity_index(p, ref.name, method, mode)});
    }
    return report;
}

} // namespace rabies
