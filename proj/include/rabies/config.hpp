#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rabies/estimation.hpp"
#include "rabies/forcing.hpp"
#include "rabies/integrator.hpp"
#include "rabies/ngm.hpp"
#include "rabies/params.hpp"
#include "rabies/state.hpp"

namespace rabies {

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;
    /// Also integrate each grid point and report peak and final infected counts.
    bool simulate = false;
};

struct GenerateSpec {
    double t_end = 100.0;
    double step = 1.0;
    double noise_sd = 0.0;
    NoiseMode noise_mode = NoiseMode::Relative;
    std::vector<Compartment> observed = default_observables();
};

struct FitSpec {
    std::vector<std::string> free;
    /// Starting values; free parameters missing here start at init_factor * value.
    std::map<std::string, double> init;
    double init_factor = 1.0;
    std::map<std::string, std::pair<double, double>> bounds;
    std::optional<std::string> dataset; ///< CSV path; sidecar at <path>.json if present
    std::optional<GenerateSpec> generate;
    bool polish = true;
    int max_iterations = 2000;
};

struct StabilitySpec {
    bool endemic = false;
    double horizon = 500.0;
};

struct ScenarioConfig {
    Params params = default_params();
    StateVector y0 = reference_initial_condition();
    double t0 = 0.0;
    double t1 = 100.0;
    double sample_every = 1.0;
    std::optional<ForcingConfig> forcing;
    IntegratorConfig integrator;
    SweepSpec sweep;
    std::optional<FitSpec> fit;
    StabilitySpec stability;
    std::uint64_t seed = 0;
    FMode mode = FMode::PaperLiteral;
};

/// Builds a config from a JSON document. Every key is checked; unknown keys,
/// wrong types and out-of-range values throw ConfigError naming the offending path.
ScenarioConfig parse_config(const nlohmann::json& doc);

/// Reads a file and parses it; syntax errors report line and column.
nlohmann::json load_config_document(const std::string& path);

/// Applies `key=value` to the document. A bare parameter name addresses
/// params.<name>; otherwise the key is a dotted path. The value is read as JSON
/// when it parses, else as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Sample times t0, t0 + step, ..., ending exactly at t1.
std::vector<double> sample_grid(double t0, double t1, double step);

} // namespace rabies
