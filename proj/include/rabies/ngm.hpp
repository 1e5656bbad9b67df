#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rabies/params.hpp"

namespace rabies {

using Matrix7 = Eigen::Matrix<double, 7, 7>;

/// How the new-infection matrix treats the environmental route.
///  - PaperLiteral: environment column left at zero, as in the original F.
///  - Corrected: column 7 carries the linearised saturation terms (d lambda/dM = 1/c at M = 0).
enum class FMode { PaperLiteral, Corrected };

std::string_view to_string(FMode mode) noexcept;
/// Accepts "paper-literal" or "corrected"; throws ConfigError otherwise.
FMode fmode_from_string(std::string_view text);

/// The twelve non-trivial entries of F V^-1 (rows 1, 3, 5; columns 3..6).
struct REntries {
    double r13 = 0, r14 = 0, r15 = 0, r16 = 0;
    double r33 = 0, r34 = 0, r35 = 0, r36 = 0;
    double r53 = 0, r54 = 0, r55 = 0, r56 = 0;

    static constexpr std::array<std::string_view, 12> names = {
        "R13", "R14", "R15", "R16", "R33", "R34", "R35", "R36", "R53", "R54", "R55", "R56"};
    std::array<double, 12> as_array() const noexcept;
};

struct NgmDecomposition {
    FMode mode = FMode::PaperLiteral;
    Matrix7 f_matrix;
    Matrix7 v_matrix;
    Matrix7 v_inverse;
    Matrix7 ngm;
    /// Read off the computed product.
    REntries r_entries;
    /// The same entries as printed in the original closed-form formulas.
    REntries transcribed_entries;
    /// Names of entries where the printed formula disagrees with the product.
    std::vector<std::string> discrepancies;
    /// Spectral radius of ngm.
    double r0 = 0.0;
};

Matrix7 build_f(const Params& p, FMode mode);
Matrix7 build_v(const Params& p);

/// Throws SingularTransfer if a diagonal entry of V is zero.
NgmDecomposition next_generation_matrix(const Params& p, FMode mode = FMode::PaperLiteral);

/// Largest eigenvalue modulus of a dense square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

/// R entries from closed-form expressions that agree with the product F V^-1.
REntries r_entries_closed_form(const Params& p);

/// R entries exactly as printed (gamma in R15/R55, kappa1 in R35/R36).
REntries r_entries_transcribed(const Params& p);

/// Dominant root of the 2x2 (R33, R35; R53, R55) block. Throws NegativeDiscriminant
/// if the radicand is negative beyond round-off.
double r0_closed_form(const Params& p);

/// Closed form evaluated on the transcribed entries; reported for comparison only.
double r0_closed_form_transcribed(const Params& p);

enum class SensitivityMethod { AnalyticClosedForm, CentralDifference };

std::string_view to_string(SensitivityMethod method) noexcept;

/// Normalised forward sensitivity index (dR0/dp)(p/R0).
///
/// The analytic method differentiates the closed form with forward-mode dual
/// numbers and is defined for FMode::PaperLiteral only. The central-difference
/// method perturbs the parameter by a relative 1e-6 and recomputes the spectral
/// radius of the next-generation matrix in the requested mode.
///
/// Throws ZeroParameter if the parameter is zero and ZeroR0 if R0 is zero.
double sensitivity_index(const Params& p, std::string_view name, SensitivityMethod method,
                         FMode mode = FMode::PaperLiteral);

struct SensitivityEntry {
    std::string name;
    double index = 0.0;
};

struct SensitivityReport {
    SensitivityMethod method = SensitivityMethod::AnalyticClosedForm;
    std::vector<SensitivityEntry> entries;

    /// Throws ConfigError if name is not in the report.
    double at(std::string_view name) const;
};

struct ReferenceIndex {
    std::string_view name;
    double value;
};

/// Reference sensitivity indices, left column then right column.
inline constexpr std::array<ReferenceIndex, 14> kReferenceSensitivity = {{
    {"gamma1", -0.105552}, {"gamma2", -0.056998}, {"kappa1", +0.897120}, {"mu2", -1.616021},
    {"mu3", -0.105358},    {"sigma2", -0.540654}, {"theta2", +0.941420}, {"psi1", +0.051422},
    {"psi2", +0.005436},   {"kappa2", +0.051422}, {"rho1", -0.046747},   {"rho2", -0.004832},
    {"sigma3", -0.05144},  {"theta3", +0.056858},
}};

/// Indices for the fourteen reference parameters, in reference order.
SensitivityReport sensitivity_table(const Params& p,
                                    SensitivityMethod method = SensitivityMethod::AnalyticClosedForm,
                                    FMode mode = FMode::PaperLiteral);

} // namespace rabies
