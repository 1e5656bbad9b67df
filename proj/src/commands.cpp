#include "rabies/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "rabies/csv.hpp"
#include "rabies/equilibria.hpp"
#include "rabies/errors.hpp"
#include "rabies/estimation.hpp"
#include "rabies/forcing.hpp"
#include "rabies/report.hpp"

namespace rabies {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Artifacts {
public:
    Artifacts(const ScenarioConfig& cfg, const fs::path& dir)
        : dir_(dir), provenance_(provenance_line(cfg.seed, cfg.mode))
    {
        fs::create_directories(dir_);
    }

    std::ofstream csv(const std::string& name)
    {
        std::ofstream out = open(name);
        write_metadata_line(out, provenance_);
        return out;
    }

    void json_file(const std::string& name, json doc)
    {
        doc["provenance"] = "# " + provenance_;
        std::ofstream out = open(name);
        out << doc.dump(2) << '\n';
    }

    std::vector<std::string> written() const { return written_; }

private:
    std::ofstream open(const std::string& name)
    {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) {
            throw Error("cannot write '" + (dir_ / name).string() + "'");
        }
        written_.push_back(name);
        return out;
    }

    fs::path dir_;
    std::string provenance_;
    std::vector<std::string> written_;
};

std::string name_of(Compartment c)
{
    return std::string(kCompartmentNames[index_of(c)]);
}

json state_json(const StateVector& y)
{
    json out;
    for (std::size_t i = 0; i < kNumCompartments; ++i) {
        out[std::string(kCompartmentNames[i])] = y[i];
    }
    return out;
}

RhsFunction scenario_rhs(const ScenarioConfig& cfg, const Params& p)
{
    return cfg.forcing ? forced_rhs(p, *cfg.forcing) : make_rhs(p);
}

json r0_pair(const Params& p)
{
    return {{"paper-literal", next_generation_matrix(p, FMode::PaperLiteral).r0},
            {"corrected", next_generation_matrix(p, FMode::Corrected).r0}};
}

// Runs fn(i) for i in [0, n) across a small pool; results land in caller-owned slots.
template <typename Fn>
void parallel_for(std::size_t n, Fn fn)
{
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace

std::vector<std::string> cmd_simulate(const ScenarioConfig& cfg, const fs::path& out_dir)
{
    Artifacts art(cfg, out_dir);
    const std::vector<double> times = sample_grid(cfg.t0, cfg.t1, cfg.sample_every);
    const Trajectory traj = integrate_at(scenario_rhs(cfg, cfg.params), cfg.y0, times, cfg.integrator);

    {
        auto out = art.csv("trajectory.csv");
        std::vector<std::string> row{"t"};
        for (auto name : kCompartmentNames) {
            row.emplace_back(name);
        }
        if (cfg.forcing) {
            for (const auto& target : cfg.forcing->targets) {
                row.push_back("factor_" + target);
            }
        }
        write_csv_row(out, row);
        for (std::size_t k = 0; k < traj.size(); ++k) {
            row.clear();
            row.push_back(format_double(traj.times[k]));
            for (double v : traj.states[k].values) {
                row.push_back(format_double(v));
            }
            if (cfg.forcing) {
                const double factor = modulation_factor(*cfg.forcing, traj.times[k]);
                row.insert(row.end(), cfg.forcing->targets.size(), format_double(factor));
            }
            write_csv_row(out, row);
        }
    }

    json peaks;
    for (Compartment c : kInfectedCompartments) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < traj.size(); ++k) {
            if (traj.states[k][c] > traj.states[best][c]) {
                best = k;
            }
        }
        peaks[name_of(c)] = {{"value", traj.states[best][c]}, {"time", traj.times[best]}};
    }
    json summary{{"t_span", {cfg.t0, cfg.t1}},
                 {"samples", traj.size()},
                 {"final_state", state_json(traj.back())},
                 {"peaks", peaks},
                 {"r0", r0_pair(cfg.params)}};
    if (cfg.forcing) {
        summary["forcing"] = {{"amplitude", cfg.forcing->amplitude},
                              {"period", cfg.forcing->period},
                              {"phase", cfg.forcing->phase},
                              {"targets", cfg.forcing->targets},
                              {"note", "scenario values are user choices, not taken from the source"}};
    }
    art.json_file("summary.json", summary);
    return art.written();
}

std::vector<std::string> cmd_r0(const ScenarioConfig& cfg, const fs::path& out_dir)
{
    Artifacts art(cfg, out_dir);
    const NgmDecomposition d = next_generation_matrix(cfg.params, cfg.mode);
    const double closed = r0_closed_form(cfg.params);
    const double literal = next_generation_matrix(cfg.params, FMode::PaperLiteral).r0;
    const double agreement = literal == 0.0 ? std::abs(closed) : std::abs(closed - literal) / literal;

    json report{{"r0", r0_pair(cfg.params)},
                {"closed_form", closed},
                {"closed_form_relative_difference", agreement},
                {"closed_form_as_printed", r0_closed_form_transcribed(cfg.params)},
                {"decomposition", to_json(d)}};
    art.json_file("r0.json", report);

    {
        auto out = art.csv("ngm.csv");
        std::vector<std::string> row{"row"};
        for (Compartment c : kInfectedCompartments) {
            row.push_back(name_of(c));
        }
        write_csv_row(out, row);
        for (int i = 0; i < 7; ++i) {
            row.assign(1, name_of(kInfectedCompartments[i]));
            for (int j = 0; j < 7; ++j) {
                row.push_back(format_double(d.ngm(i, j)));
            }
            write_csv_row(out, row);
        }
    }
    {
        auto out = art.csv("r_entries.csv");
        write_csv_row(out, {"entry", "product", "as_printed"});
        const auto product = d.r_entries.as_array();
        const auto printed = d.transcribed_entries.as_array();
        for (std::size_t i = 0; i < product.size(); ++i) {
            write_csv_row(out, {std::string(REntries::names[i]), format_double(product[i]),
                                format_double(printed[i])});
        }
    }
    return art.written();
}

std::vector<std::string> cmd_sensitivity(const ScenarioConfig& cfg, const fs::path& out_dir)
{
    Artifacts art(cfg, out_dir);
    const bool literal = cfg.mode == FMode::PaperLiteral;
    const SensitivityReport fd =
        sensitivity_table(cfg.params, SensitivityMethod::CentralDifference, cfg.mode);
    SensitivityReport analytic;
    if (literal) {
        analytic = sensitivity_table(cfg.params, SensitivityMethod::AnalyticClosedForm);
    }

    auto out = art.csv("sensitivity.csv");
    write_csv_row(out, {"parameter", "analytic", "fd", "reference_sign", "sign_match"});
    json rows = json::array();
    int matches = 0;
    for (std::size_t i = 0; i < kReferenceSensitivity.size(); ++i) {
        const auto& ref = kReferenceSensitivity[i];
        const double a = literal ? analytic.entries[i].index : std::nan("");
        const double f = fd.entries[i].index;
        const double judged = literal ? a : f;
        const bool match = judged != 0.0 && (judged > 0) == (ref.value > 0);
        matches += match;
        write_csv_row(out, {std::string(ref.name), format_double(a), format_double(f),
                            ref.value > 0 ? "+" : "-", match ? "true" : "false"});
        json row{{"parameter", ref.name}, {"fd", f}, {"reference", ref.value}, {"sign_match", match}};
        if (literal) {
            row["analytic"] = a;
        }
        rows.push_back(row);
    }
    art.json_file("sensitivity.json",
                  {{"rows", rows}, {"sign_matches", matches}, {"r0", next_generation_matrix(cfg.params, cfg.mode).r0}});
    return art.written();
}

std::vector<std::string> cmd_sweep(const ScenarioConfig& cfg, const fs::path& out_dir)
{
    Artifacts art(cfg, out_dir);
    const auto& axes = cfg.sweep.axes;
    std::size_t points = 1;
    for (const auto& a : axes) {
        points *= a.values.size();
    }

    // First axis varies slowest.
    std::vector<std::vector<double>> coords(points);
    for (std::size_t k = 0; k < points; ++k) {
        std::size_t rest = k;
        coords[k].resize(axes.size());
        for (std::size_t j = axes.size(); j-- > 0;) {
            coords[k][j] = axes[j].values[rest % axes[j].values.size()];
            rest /= axes[j].values.size();
        }
    }

    const Compartment tracked[] = {Compartment::IH, Compartment::IF, Compartment::ID};
    std::vector<std::vector<double>> results(points);
    const std::vector<double> times =
        cfg.sweep.simulate ? sample_grid(cfg.t0, cfg.t1, cfg.sample_every) : std::vector<double>{};
    parallel_for(points, [&](std::size_t k) {
        Params p = cfg.params;
        for (std::size_t j = 0; j < axes.size(); ++j) {
            set_param(p, axes[j].name, coords[k][j]);
        }
        validate(p);
        results[k].push_back(next_generation_matrix(p, cfg.mode).r0);
        if (cfg.sweep.simulate) {
            const Trajectory traj = integrate_at(scenario_rhs(cfg, p), cfg.y0, times, cfg.integrator);
            for (Compartment c : tracked) {
                double peak = 0.0;
                for (const auto& y : traj.states) {
                    peak = std::max(peak, y[c]);
                }
                results[k].push_back(peak);
            }
            for (Compartment c : tracked) {
                results[k].push_back(traj.back()[c]);
            }
        }
    });

    auto out = art.csv("sweep.csv");
    std::vector<std::string> row;
    for (const auto& a : axes) {
        row.push_back(a.name);
    }
    row.emplace_back("r0");
    if (cfg.sweep.simulate) {
        for (Compartment c : tracked) {
            row.push_back("peak_" + name_of(c));
        }
        for (Compartment c : tracked) {
            row.push_back("final_" + name_of(c));
        }
    }
    write_csv_row(out, row);
    for (std::size_t k = 0; k < points; ++k) {
        row.clear();
        for (double v : coords[k]) {
            row.push_back(format_double(v));
        }
        for (double v : results[k]) {
            row.push_back(format_double(v));
        }
        write_csv_row(out, row);
    }
    return art.written();
}

std::vector<std::string> cmd_fit(const ScenarioConfig& cfg, const fs::path& out_dir)
{
    if (!cfg.fit) {
        throw ConfigError("config.fit: required for the fit command");
    }
    const FitSpec& spec = *cfg.fit;
    if (!spec.dataset && !spec.generate) {
        throw ConfigError("config.fit: give 'dataset' (a CSV path) or 'generate' (a synthetic-data spec)");
    }
    Artifacts art(cfg, out_dir);

    SyntheticDataset data;
    bool truth_known = false;
    if (spec.generate) {
        const GenerateSpec& g = *spec.generate;
        data = generate_synthetic(cfg.params, cfg.y0, sample_grid(cfg.t0, cfg.t0 + g.t_end, g.step),
                                  g.noise_sd, cfg.seed, g.observed, g.noise_mode);
        truth_known = true;
        auto out = art.csv("dataset.csv");
        write_dataset_csv(out, data);
        art.json_file("dataset.json", dataset_metadata(data));
    } else {
        std::ifstream in(*spec.dataset);
        if (!in) {
            throw ConfigError("config.fit.dataset: cannot open '" + *spec.dataset + "'");
        }
        data = read_dataset_csv(in);
        const fs::path sidecar = fs::path(*spec.dataset).replace_extension(".json");
        if (fs::exists(sidecar)) {
            std::ifstream meta(sidecar);
            json doc;
            try {
                doc = json::parse(meta);
            } catch (const json::parse_error&) {
                throw ConfigError("dataset sidecar '" + sidecar.string() + "' is not valid JSON");
            }
            apply_dataset_metadata(data, doc);
            truth_known = doc.contains("truth");
        }
    }

    Params init = cfg.params;
    for (const auto& name : spec.free) {
        const auto it = spec.init.find(name);
        set_param(init, name, it != spec.init.end() ? it->second : spec.init_factor * get_param(cfg.params, name));
    }
    FitOptions options;
    options.bounds = spec.bounds;
    options.polish = spec.polish;
    options.max_iterations = spec.max_iterations;

    FitResult result = fit(data, init, spec.free, cfg.y0, options);
    json report = to_json(result);
    try {
        result.ci_half_widths = confidence_intervals(result, data, cfg.y0);
        report = to_json(result);
    } catch (const SingularInformation& e) {
        report["ci_error"] = e.what();
    }

    auto fit_csv = art.csv("fit.csv");
    write_csv_row(fit_csv, {"parameter", "estimate", "truth", "ci_half_width"});
    bool recovered = true;
    for (std::size_t k = 0; k < spec.free.size(); ++k) {
        const double est = get_param(result.estimate, spec.free[k]);
        const double truth = get_param(data.truth, spec.free[k]);
        const double ci = k < result.ci_half_widths.size() ? result.ci_half_widths[k] : std::nan("");
        write_csv_row(fit_csv, {spec.free[k], format_double(est),
                                truth_known ? format_double(truth) : "", format_double(ci)});
        if (truth_known) {
            recovered = recovered && std::abs(est - truth) <= 0.01 * std::abs(truth);
            report["estimates"][spec.free[k]]["truth"] = truth;
        }
    }
    if (truth_known) {
        report["recovered_within_1pct"] = recovered;
    }
    art.json_file("fit.json", report);

    const Trajectory fitted = integrate_at(make_rhs(result.estimate), cfg.y0, data.times, fitting_integrator());
    auto curve = art.csv("fitted.csv");
    std::vector<std::string> row{"t"};
    for (Compartment c : data.observed) {
        row.push_back(name_of(c));
    }
    write_csv_row(curve, row);
    for (std::size_t k = 0; k < fitted.size(); ++k) {
        row.assign(1, format_double(fitted.times[k]));
        for (Compartment c : data.observed) {
            row.push_back(format_double(fitted.states[k][c]));
        }
        write_csv_row(curve, row);
    }
    return art.written();
}

std::vector<std::string> cmd_stability(const ScenarioConfig& cfg, const fs::path& out_dir)
{
    Artifacts art(cfg, out_dir);
    const StabilityReport r = local_dfe_stability(cfg.params, cfg.mode);
    const double r0 = next_generation_matrix(cfg.params, cfg.mode).r0;
    json report = to_json(r);
    report["r0"] = r0;
    report["consistent_with_r0"] =
        (r.classification == Classification::Unstable) == (r0 > 1.0);

    if (cfg.stability.endemic) {
        StateVector y = disease_free_equilibrium(cfg.params).state;
        for (Compartment c : kInfectedCompartments) {
            y[c] += 1e-3;
        }
        y = integrate_adaptive(make_rhs(cfg.params), y, 0.0, cfg.stability.horizon, cfg.integrator).back();
        try {
            const EquilibriumResult eq = find_endemic_equilibrium(cfg.params, y);
            std::vector<std::complex<double>> eigs;
            json e = to_json(eq);
            e["classification"] = to_string(classify_equilibrium(eq.state, cfg.params, &eigs));
            json list = json::array();
            for (const auto& z : eigs) {
                list.push_back({{"re", z.real()}, {"im", z.imag()}});
            }
            e["jacobian_eigenvalues"] = list;
            report["endemic"] = e;
        } catch (const DomainError& e) {
            // The long-run state touched zero somewhere; Newton needs a positive start.
            report["endemic"] = {{"error", e.what()}, {"state_at_horizon", state_json(y)}};
        } catch (const NoConvergence& e) {
            report["endemic"] = {{"error", e.what()}, {"state_at_horizon", state_json(y)}};
        } catch (const NegativeEquilibrium& e) {
            report["endemic"] = {{"error", e.what()}, {"state_at_horizon", state_json(y)}};
        }
    }
    art.json_file("stability.json", report);

    auto out = art.csv("eigenvalues.csv");
    write_csv_row(out, {"index", "re", "im"});
    for (std::size_t i = 0; i < r.jacobian_eigenvalues.size(); ++i) {
        write_csv_row(out, {std::to_string(i + 1), format_double(r.jacobian_eigenvalues[i].real()),
                            format_double(r.jacobian_eigenvalues[i].imag())});
    }
    return art.written();
}

} // namespace rabies
