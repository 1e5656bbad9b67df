#include "rabies/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "rabies/csv.hpp"
#include "rabies/errors.hpp"
#include "rabies/optimize.hpp"

namespace rabies {

NormalStream::NormalStream(std::uint64_t seed) : engine_(seed) {}

double NormalStream::uniform()
{
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double NormalStream::next()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::string_view to_string(NoiseMode mode) noexcept
{
    return mode == NoiseMode::Relative ? "relative" : "absolute";
}

NoiseMode noise_mode_from_string(std::string_view text)
{
    if (text == "relative") {
        return NoiseMode::Relative;
    }
    if (text == "absolute") {
        return NoiseMode::Absolute;
    }
    throw ConfigError("unknown noise mode '" + std::string(text) + "'");
}

std::vector<Compartment> default_observables()
{
    return {Compartment::EH, Compartment::IH, Compartment::IF, Compartment::ID};
}

IntegratorConfig fitting_integrator()
{
    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-10;
    cfg.h_init = 1e-3;
    cfg.h_max = 0.5;
    cfg.max_steps = 200000;
    return cfg;
}

SyntheticDataset generate_synthetic(const Params& truth, const StateVector& y0,
                                    const std::vector<double>& times, double noise_sd,
                                    std::uint64_t seed, const std::vector<Compartment>& observed,
                                    NoiseMode mode, const IntegratorConfig& cfg)
{
    if (!(noise_sd >= 0.0)) {
        throw DomainError("noise_sd must be non-negative");
    }
    if (observed.empty()) {
        throw DomainError("at least one observed compartment is required");
    }
    validate(truth);
    const Trajectory traj = integrate_at(make_rhs(truth), y0, times, cfg);

    SyntheticDataset data;
    data.times = times;
    data.observed = observed;
    data.noise_sd = noise_sd;
    data.noise_mode = mode;
    data.seed = seed;
    data.truth = truth;
    data.scales.assign(observed.size(), 1.0);
    if (mode == NoiseMode::Relative) {
        for (std::size_t j = 0; j < observed.size(); ++j) {
            double peak = 0.0;
            for (const auto& y : traj.states) {
                peak = std::max(peak, std::abs(y[observed[j]]));
            }
            data.scales[j] = peak > 0.0 ? peak : 1.0;
        }
    }

    NormalStream noise(seed);
    data.observations.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        auto& row = data.observations[i];
        row.resize(observed.size());
        for (std::size_t j = 0; j < observed.size(); ++j) {
            row[j] = traj.states[i][observed[j]];
            if (noise_sd > 0.0) {
                row[j] += noise_sd * data.scales[j] * noise.next();
            }
        }
    }
    return data;
}

std::vector<double> scaled_residuals(const Params& candidate, const SyntheticDataset& data,
                                     const StateVector& y0, const IntegratorConfig& cfg)
{
    Trajectory traj;
    try {
        traj = integrate_at(make_rhs(candidate), y0, data.times, cfg);
    } catch (const Error&) {
        return {};
    }
    std::vector<double> out;
    out.reserve(data.times.size() * data.observed.size());
    for (std::size_t i = 0; i < data.times.size(); ++i) {
        for (std::size_t j = 0; j < data.observed.size(); ++j) {
            out.push_back((data.observations[i][j] - traj.states[i][data.observed[j]]) /
                          data.scales[j]);
        }
    }
    return out;
}

double sse(const Params& candidate, const SyntheticDataset& data, const StateVector& y0,
           const IntegratorConfig& cfg)
{
    const auto r = scaled_residuals(candidate, data, y0, cfg);
    if (r.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    double total = 0.0;
    for (double v : r) {
        total += v * v;
    }
    return std::isfinite(total) ? total : std::numeric_limits<double>::infinity();
}

namespace {

// Coordinates still at their starting log keep the exact starting value, so a fit
// that never moves returns init bit-for-bit.
Params with_log_values(const Params& base, const std::vector<std::string>& names,
                       const std::vector<double>& start, const std::vector<double>& logs)
{
    Params p = base;
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (logs[k] != start[k]) {
            set_param(p, names[k], std::exp(logs[k]));
        }
    }
    return p;
}

} // namespace

FitResult fit(const SyntheticDataset& data, const Params& init,
              const std::vector<std::string>& free_names, const StateVector& y0,
              const FitOptions& options)
{
    if (free_names.empty()) {
        throw DomainError("fit needs at least one free parameter");
    }
    validate(init);

    NelderMeadOptions nm;
    nm.max_iterations = options.max_iterations;
    nm.initial_step = 0.1;
    std::vector<double> x0;
    for (const auto& name : free_names) {
        const double v = get_param(init, name);
        if (!(v > 0.0)) {
            throw DomainError("free parameter '" + name + "' must start positive");
        }
        double lo = v / 100.0;
        double hi = v * 100.0;
        if (auto it = options.bounds.find(name); it != options.bounds.end()) {
            lo = it->second.first;
            hi = it->second.second;
        }
        if (!(lo > 0.0) || !(hi >= lo) || v < lo || v > hi) {
            throw DomainError("initial value of '" + name + "' must lie inside positive bounds");
        }
        x0.push_back(std::log(v));
        nm.lower.push_back(std::log(lo));
        nm.upper.push_back(std::log(hi));
    }

    auto objective = [&](const std::vector<double>& logs) {
        return sse(with_log_values(init, free_names, x0, logs), data, y0, options.integrator);
    };
    const NelderMeadResult simplex = nelder_mead(objective, x0, nm);

    FitResult out;
    out.free_names = free_names;
    out.initial_sse = simplex.initial_value;
    out.iterations = simplex.iterations;
    out.converged = simplex.converged;
    out.sse_history = simplex.best_history;
    std::vector<double> best = simplex.x;
    double best_value = simplex.value;

    if (!(best_value < out.initial_sse) && out.initial_sse > 0.0 && !simplex.converged) {
        throw NoImprovement("simplex search never improved on the initial objective");
    }

    if (options.polish && best_value > 0.0) {
        LevenbergMarquardtOptions lm;
        lm.lower = nm.lower;
        lm.upper = nm.upper;
        lm.fd_step = 1e-6;
        auto residuals = [&](const std::vector<double>& logs) {
            auto r = scaled_residuals(with_log_values(init, free_names, x0, logs), data, y0,
                                      options.integrator);
            if (r.empty()) {
                r.assign(data.times.size() * data.observed.size(),
                         std::numeric_limits<double>::infinity());
            }
            return r;
        };
        const auto polished = levenberg_marquardt(residuals, best, lm);
        if (polished.value < best_value) {
            best = polished.x;
            best_value = polished.value;
            out.sse_history.push_back(best_value);
        }
    }

    out.estimate = with_log_values(init, free_names, x0, best);
    out.sse = best_value;
    return out;
}

std::vector<double> confidence_intervals(const FitResult& result, const SyntheticDataset& data,
                                         const StateVector& y0, const IntegratorConfig& cfg)
{
    const std::size_t k = result.free_names.size();
    const std::size_t n = data.times.size() * data.observed.size();
    if (n <= k) {
        throw SingularInformation("not enough observations for the free parameters");
    }
    std::vector<double> x;
    std::vector<double> steps;
    for (const auto& name : result.free_names) {
        const double v = get_param(result.estimate, name);
        x.push_back(v);
        steps.push_back(1e-5 * std::max(std::abs(v), 1e-300));
    }
    auto residuals = [&](const std::vector<double>& values) {
        Params p = result.estimate;
        for (std::size_t j = 0; j < k; ++j) {
            set_param(p, result.free_names[j], values[j]);
        }
        auto r = scaled_residuals(p, data, y0, cfg);
        if (r.empty()) {
            throw SingularInformation("integration failed while probing the residual Jacobian");
        }
        return r;
    };
    const auto jac = residual_jacobian(residuals, x, steps);

    Eigen::MatrixXd J(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = jac[i][j];
        }
    }
    // Column scaling makes the rank test independent of parameter units.
    Eigen::VectorXd col_norm = J.colwise().norm().transpose();
    for (std::size_t j = 0; j < k; ++j) {
        if (!(col_norm(static_cast<Eigen::Index>(j)) > 0.0)) {
            throw SingularInformation("parameter '" + result.free_names[j] +
                                      "' has no influence on the observed compartments");
        }
    }
    const Eigen::MatrixXd scaled = J * col_norm.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-10 * sv(0)) {
        throw SingularInformation("residual Jacobian is rank deficient; free set is not identifiable");
    }

    const double s2 = result.sse / static_cast<double>(n - k);
    const Eigen::MatrixXd info = scaled.transpose() * scaled;
    const Eigen::MatrixXd cov_scaled = info.inverse();
    std::vector<double> half(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double var = s2 * cov_scaled(jj, jj) / (col_norm(jj) * col_norm(jj));
        half[j] = 1.96 * std::sqrt(std::max(var, 0.0));
    }
    return half;
}

nlohmann::json dataset_metadata(const SyntheticDataset& data)
{
    nlohmann::json meta;
    meta["truth"] = params_to_json(data.truth);
    meta["seed"] = data.seed;
    meta["noise_sd"] = data.noise_sd;
    meta["noise_mode"] = std::string(to_string(data.noise_mode));
    meta["scales"] = data.scales;
    std::vector<std::string> names;
    for (auto c : data.observed) {
        names.emplace_back(kCompartmentNames[index_of(c)]);
    }
    meta["observed"] = names;
    return meta;
}

void apply_dataset_metadata(SyntheticDataset& data, const nlohmann::json& meta)
{
    try {
        if (meta.contains("truth")) {
            data.truth = params_from_json(meta.at("truth"));
        }
        if (meta.contains("seed")) {
            data.seed = meta.at("seed").get<std::uint64_t>();
        }
        if (meta.contains("noise_sd")) {
            data.noise_sd = meta.at("noise_sd").get<double>();
        }
        if (meta.contains("noise_mode")) {
            data.noise_mode = noise_mode_from_string(meta.at("noise_mode").get<std::string>());
        }
        if (meta.contains("scales")) {
            auto scales = meta.at("scales").get<std::vector<double>>();
            if (scales.size() != data.observed.size()) {
                throw ConfigError("dataset sidecar has " + std::to_string(scales.size()) +
                                  " scales for " + std::to_string(data.observed.size()) +
                                  " observed columns");
            }
            data.scales = std::move(scales);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid dataset sidecar: ") + e.what());
    }
}

void write_dataset_csv(std::ostream& out, const SyntheticDataset& data, const std::string& metadata)
{
    write_metadata_line(out, metadata);
    std::vector<std::string> row{"t"};
    for (auto c : data.observed) {
        row.emplace_back(kCompartmentNames[index_of(c)]);
    }
    write_csv_row(out, row);
    for (std::size_t i = 0; i < data.times.size(); ++i) {
        row.clear();
        row.push_back(format_double(data.times[i]));
        for (double v : data.observations[i]) {
            row.push_back(format_double(v));
        }
        write_csv_row(out, row);
    }
}

SyntheticDataset read_dataset_csv(std::istream& in)
{
    const CsvTable table = read_csv(in);
    if (table.header.empty() || table.header[0] != "t") {
        throw ConfigError("dataset CSV must start with a 't' column");
    }
    SyntheticDataset data;
    for (std::size_t j = 1; j < table.header.size(); ++j) {
        auto c = compartment_from_name(table.header[j]);
        if (!c) {
            throw ConfigError("unknown compartment column '" + table.header[j] + "'");
        }
        data.observed.push_back(*c);
    }
    data.scales.assign(data.observed.size(), 1.0);
    data.noise_mode = NoiseMode::Absolute;
    for (const auto& row : table.rows) {
        data.times.push_back(parse_double(row[0]));
        std::vector<double> obs;
        for (std::size_t j = 1; j < row.size(); ++j) {
            obs.push_back(parse_double(row[j]));
        }
        data.observations.push_back(std::move(obs));
    }
    return data;
}

} // namespace rabies
