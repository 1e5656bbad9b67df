#pragma once

#include <string>

#include "json.hpp"

#include "rabies/equilibria.hpp"
#include "rabies/estimation.hpp"
#include "rabies/ngm.hpp"

namespace rabies {

inline constexpr const char* kVersion = "0.1.0";

/// `rabies-dyn <version> seed=<s> mode=<m>`
std::string provenance_line(std::uint64_t seed, FMode mode);

nlohmann::json to_json(const NgmDecomposition& ngm);
nlohmann::json to_json(const SensitivityReport& report);
nlohmann::json to_json(const EquilibriumResult& eq);
nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const MetzlerResult& result);
nlohmann::json to_json(const FitResult& fit);

} // namespace rabies
