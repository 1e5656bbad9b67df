#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rabies/integrator.hpp"
#include "rabies/params.hpp"
#include "rabies/state.hpp"

namespace rabies {

/// Seedable normal stream: std::mt19937_64 words mapped to doubles in (0, 1] with
/// 53-bit resolution ((w >> 11) + 1) * 2^-53, then the Box-Muller transform
/// emitting sqrt(-2 ln u1) cos(2 pi u2) followed by sqrt(-2 ln u1) sin(2 pi u2).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed);
    double next();

private:
    double uniform();

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

enum class NoiseMode { Relative, Absolute };

std::string_view to_string(NoiseMode mode) noexcept;
NoiseMode noise_mode_from_string(std::string_view text);

/// Observed compartments used when none are given.
std::vector<Compartment> default_observables();

struct SyntheticDataset {
    std::vector<double> times;
    std::vector<Compartment> observed;
    /// observations[i][j]: compartment observed[j] at times[i].
    std::vector<std::vector<double>> observations;
    /// Per observed compartment: the unit in which noise_sd is expressed.
    /// Relative mode uses max |trajectory| of that compartment, absolute mode 1.
    std::vector<double> scales;
    double noise_sd = 0.0;
    NoiseMode noise_mode = NoiseMode::Relative;
    std::uint64_t seed = 0;
    Params truth;
};

/// Integrator settings shared by data generation and the objective, so
/// a zero-noise dataset is reproduced exactly at the truth.
IntegratorConfig fitting_integrator();

SyntheticDataset generate_synthetic(const Params& truth, const StateVector& y0,
                                    const std::vector<double>& times, double noise_sd,
                                    std::uint64_t seed,
                                    const std::vector<Compartment>& observed = default_observables(),
                                    NoiseMode mode = NoiseMode::Relative,
                                    const IntegratorConfig& cfg = fitting_integrator());

/// Residuals (observation - model) / scale, time-major. Empty on integration failure.
std::vector<double> scaled_residuals(const Params& candidate, const SyntheticDataset& data,
                                     const StateVector& y0,
                                     const IntegratorConfig& cfg = fitting_integrator());

/// Sum of squared scaled residuals; +infinity if the integration fails.
double sse(const Params& candidate, const SyntheticDataset& data, const StateVector& y0,
           const IntegratorConfig& cfg = fitting_integrator());

struct FitOptions {
    /// Per-parameter [lower, upper]; missing names default to [init/100, init*100].
    std::map<std::string, std::pair<double, double>> bounds;
    bool polish = true; ///< Levenberg-Marquardt refinement after the simplex
    int max_iterations = 2000;
    IntegratorConfig integrator = fitting_integrator();
};

struct FitResult {
    Params estimate;
    std::vector<std::string> free_names;
    double sse = 0.0;
    double initial_sse = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> ci_half_widths;
    /// Best-so-far objective after each simplex iteration.
    std::vector<double> sse_history;
};

/// Nelder-Mead on the logarithms of the free parameters, optionally polished by
/// Levenberg-Marquardt. Throws NoImprovement if the search never improves on a
/// positive initial objective.
FitResult fit(const SyntheticDataset& data, const Params& init,
              const std::vector<std::string>& free_names, const StateVector& y0,
              const FitOptions& options = {});

/// 1.96 sqrt(diag(s^2 (J^T J)^-1)) with J the central-difference residual Jacobian
/// in natural parameter units and s^2 = sse / (n - k). Throws SingularInformation
/// when J^T J is numerically singular.
std::vector<double> confidence_intervals(const FitResult& fit, const SyntheticDataset& data,
                                         const StateVector& y0,
                                         const IntegratorConfig& cfg = fitting_integrator());

void write_dataset_csv(std::ostream& out, const SyntheticDataset& data,
                       const std::string& metadata = {});

/// Reads observations back; truth, seed and noise fields come from the sidecar.
SyntheticDataset read_dataset_csv(std::istream& in);

nlohmann::json dataset_metadata(const SyntheticDataset& data);
void apply_dataset_metadata(SyntheticDataset& data, const nlohmann::json& meta);

} // namespace rabies
