#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace rabies {

/// Compartments in the canonical storage order of the model equations.
enum class Compartment : std::size_t {
    SH = 0, EH, IH, RH,
    SF, EF, IF,
    SD, ED, ID, RD,
    M,
};

inline constexpr std::size_t kNumCompartments = 12;

inline constexpr std::array<std::string_view, kNumCompartments> kCompartmentNames = {
    "S_H", "E_H", "I_H", "R_H", "S_F", "E_F", "I_F", "S_D", "E_D", "I_D", "R_D", "M"};

/// The seven infected coordinates, in next-generation-matrix order.
inline constexpr std::array<Compartment, 7> kInfectedCompartments = {
    Compartment::EH, Compartment::IH, Compartment::EF, Compartment::IF,
    Compartment::ED, Compartment::ID, Compartment::M};

/// The five non-transmitting coordinates (S_H, R_H, S_F, S_D, R_D).
inline constexpr std::array<Compartment, 5> kUninfectedCompartments = {
    Compartment::SH, Compartment::RH, Compartment::SF, Compartment::SD, Compartment::RD};

constexpr std::size_t index_of(Compartment c) noexcept { return static_cast<std::size_t>(c); }

std::optional<Compartment> compartment_from_name(std::string_view name);

/// Values of the twelve compartments at one instant.
struct StateVector {
    std::array<double, kNumCompartments> values{};

    constexpr double& operator[](Compartment c) noexcept { return values[index_of(c)]; }
    constexpr double operator[](Compartment c) const noexcept { return values[index_of(c)]; }
    constexpr double& operator[](std::size_t i) noexcept { return values[i]; }
    constexpr double operator[](std::size_t i) const noexcept { return values[i]; }

    constexpr double s_h() const noexcept { return values[0]; }
    constexpr double e_h() const noexcept { return values[1]; }
    constexpr double i_h() const noexcept { return values[2]; }
    constexpr double r_h() const noexcept { return values[3]; }
    constexpr double s_f() const noexcept { return values[4]; }
    constexpr double e_f() const noexcept { return values[5]; }
    constexpr double i_f() const noexcept { return values[6]; }
    constexpr double s_d() const noexcept { return values[7]; }
    constexpr double e_d() const noexcept { return values[8]; }
    constexpr double i_d() const noexcept { return values[9]; }
    constexpr double r_d() const noexcept { return values[10]; }
    constexpr double m() const noexcept { return values[11]; }

    static constexpr std::size_t size() noexcept { return kNumCompartments; }

    bool all_finite() const noexcept;
    double max_abs() const noexcept;

    friend bool operator==(const StateVector&, const StateVector&) = default;
};

struct PopulationTotals {
    double n_h = 0.0;
    double n_f = 0.0;
    double n_d = 0.0;

    friend bool operator==(const PopulationTotals&, const PopulationTotals&) = default;
};

PopulationTotals population_totals(const StateVector& state) noexcept;

/// Initial condition used for the fitting and simulation experiments.
StateVector reference_initial_condition() noexcept;

} // namespace rabies
