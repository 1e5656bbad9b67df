#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rabies/model.hpp"
#include "rabies/ngm.hpp"
#include "rabies/params.hpp"
#include "rabies/state.hpp"

namespace rabies {

using Matrix12 = Eigen::Matrix<double, 12, 12>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;

enum class EquilibriumKind { DiseaseFree, Endemic };

std::string_view to_string(EquilibriumKind kind) noexcept;

struct EquilibriumResult {
    StateVector state;
    /// max_i |rhs_i(state)| / max(1, max_i |state_i|)
    double residual_norm = 0.0;
    EquilibriumKind kind = EquilibriumKind::DiseaseFree;
    bool converged = false;
    int iterations = 0;
};

/// Scaled residual used by every equilibrium routine.
double equilibrium_residual(const StateVector& y, const Params& p);

EquilibriumResult disease_free_equilibrium(const Params& p);

/// Upper bounds of the positively invariant region.
struct InvariantBounds {
    double n_h_max = 0.0;
    double n_f_max = 0.0;
    double n_d_max = 0.0;
    double m_max = 0.0;
};

InvariantBounds invariant_bounds(const Params& p);

struct NewtonConfig {
    double tol = 1e-10;
    int max_iterations = 200;
    int max_halvings = 10;
};

/// Damped Newton iteration on rhs = 0 with a central-difference Jacobian.
/// Throws NoConvergence when the iteration budget runs out and
/// NegativeEquilibrium when the limit leaves the non-negative orthant.
EquilibriumResult find_endemic_equilibrium(const Params& p, const StateVector& guess,
                                           const NewtonConfig& cfg = {});

/// Central differences of f with per-coordinate step 1e-7 * max(|y_i|, 1).
Eigen::MatrixXd numeric_jacobian(const RhsFunction& f, double t, const StateVector& y);

/// Numeric Jacobian of the model at an arbitrary state.
Matrix12 jacobian(const StateVector& y, const Params& p);

/// Analytic Jacobian at the disease-free equilibrium. PaperLiteral omits the
/// d lambda / dM = 1/c environmental-infection terms, matching the literal F.
Matrix12 dfe_jacobian(const Params& p, FMode mode = FMode::PaperLiteral);

struct QuarticCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c0 = 0.0;
};

struct RouthHurwitzResult {
    /// Full quartic criterion: c1 > 0, c3 > 0, c0 > 0 and c1 c2 c3 > c3^2 + c1^2 c0.
    bool satisfied = false;
    /// Weaker check: all four coefficients positive.
    bool all_coefficients_positive = false;
    /// c1 c2 c3 - c3^2 - c1^2 c0
    double hurwitz_margin = 0.0;
};

RouthHurwitzResult routh_hurwitz_quartic(double c1, double c2, double c3, double c0);

/// Roots of x^4 + c1 x^3 + c2 x^2 + c3 x + c0 via the companion matrix.
std::vector<std::complex<double>> quartic_roots(const QuarticCoefficients& q);

/// The free-range/domestic infected block (E_F, I_F, E_D, I_D) of the DFE Jacobian.
Matrix4 reduced_dog_block(const Params& p);

/// Characteristic-polynomial coefficients of reduced_dog_block in closed form.
QuarticCoefficients dog_block_coefficients(const Params& p);

struct MetzlerResult {
    Matrix5 g0;
    Eigen::Matrix<double, 5, 7> g1;
    Matrix7 g2;
    std::vector<double> g0_eigenvalues;
    bool g0_negative = false;
    bool g2_offdiag_nonnegative = false;
    bool verdict = false;
};

/// Splits the linearisation into non-transmitting (G0, G1) and transmitting (G2)
/// blocks and checks the sign conditions on each.
MetzlerResult metzler_global_check(const Params& p, FMode mode = FMode::PaperLiteral);

enum class Classification { LocallyStable, Unstable, Inconclusive };

std::string_view to_string(Classification c) noexcept;

struct StabilityReport {
    FMode mode = FMode::PaperLiteral;
    std::vector<std::complex<double>> jacobian_eigenvalues;
    double max_real_part = 0.0;
    QuarticCoefficients rh_coefficients;
    RouthHurwitzResult routh_hurwitz;
    std::vector<std::complex<double>> quartic_roots;
    /// Every quartic root matches a Jacobian eigenvalue within 1e-8 (relative to scale).
    bool quartic_roots_in_spectrum = false;
    /// routh_hurwitz.satisfied agrees with the sign of the quartic roots.
    bool rh_consistent = false;
    MetzlerResult metzler;
    Classification classification = Classification::Inconclusive;
};

StabilityReport local_dfe_stability(const Params& p, FMode mode = FMode::PaperLiteral);

/// Classification at an arbitrary equilibrium from the numeric Jacobian.
Classification classify_equilibrium(const StateVector& y, const Params& p,
                                    std::vector<std::complex<double>>* eigenvalues = nullptr);

} // namespace rabies
