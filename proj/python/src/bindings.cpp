#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rabies/commands.hpp"
#include "rabies/config.hpp"
#include "rabies/equilibria.hpp"
#include "rabies/errors.hpp"
#include "rabies/estimation.hpp"
#include "rabies/forcing.hpp"
#include "rabies/integrator.hpp"
#include "rabies/ngm.hpp"
#include "rabies/report.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace rabies;

namespace {

// Dicts cross the boundary as JSON text so the library's own validation applies.
json to_cpp(const py::object& obj)
{
    if (obj.is_none()) {
        return json::object();
    }
    const auto dumps = py::module_::import("json").attr("dumps");
    return json::parse(dumps(obj).cast<std::string>());
}

py::object to_py(const json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

ScenarioConfig scenario(const py::object& config)
{
    return parse_config(to_cpp(config));
}

Params params_arg(const py::object& params)
{
    return params_from_json(to_cpp(params));
}

py::array_t<double> state_matrix(const std::vector<StateVector>& states)
{
    py::array_t<double> out({states.size(), kNumCompartments});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = 0; j < kNumCompartments; ++j) {
            view(i, j) = states[i][j];
        }
    }
    return out;
}

py::list compartment_names()
{
    py::list names;
    for (auto n : kCompartmentNames) {
        names.append(std::string(n));
    }
    return names;
}

py::dict simulate(const py::object& config)
{
    const ScenarioConfig cfg = scenario(config);
    const RhsFunction f = cfg.forcing ? forced_rhs(cfg.params, *cfg.forcing) : make_rhs(cfg.params);
    const Trajectory traj =
        integrate_at(f, cfg.y0, sample_grid(cfg.t0, cfg.t1, cfg.sample_every), cfg.integrator);
    py::dict out;
    out["t"] = py::array_t<double>(traj.times.size(), traj.times.data());
    out["y"] = state_matrix(traj.states);
    out["names"] = compartment_names();
    return out;
}

SensitivityMethod method_from_string(const std::string& text)
{
    if (text == "analytic") {
        return SensitivityMethod::AnalyticClosedForm;
    }
    if (text == "fd") {
        return SensitivityMethod::CentralDifference;
    }
    throw ConfigError("method must be \"analytic\" or \"fd\", got \"" + text + "\"");
}

py::object fit_dataset(const SyntheticDataset& data, const std::vector<std::string>& free,
                       const py::object& init, bool polish, bool intervals)
{
    const StateVector y0 = reference_initial_condition();
    FitOptions options;
    options.polish = polish;
    FitResult result = fit(data, params_arg(init), free, y0, options);
    if (intervals) {
        result.ci_half_widths = confidence_intervals(result, data, y0);
    }
    return to_py(to_json(result));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Twelve-compartment rabies transmission model";
    m.attr("__version__") = kVersion;

    auto base = py::register_exception<Error>(m, "RabiesError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base);

    m.def("compartments", &compartment_names);
    m.def("default_params", [] { return to_py(params_to_json(default_params())); });
    m.def("reference_initial_condition", [] {
        const StateVector y0 = reference_initial_condition();
        py::dict out;
        for (std::size_t i = 0; i < kNumCompartments; ++i) {
            out[py::str(std::string(kCompartmentNames[i]))] = y0[i];
        }
        return out;
    });

    m.def("simulate", &simulate, py::arg("config") = py::none(),
          "Integrates a scenario; returns t, y (samples x 12) and column names.");

    m.def(
        "r0",
        [](const py::object& params, const std::string& mode) {
            return next_generation_matrix(params_arg(params), fmode_from_string(mode)).r0;
        },
        py::arg("params") = py::none(), py::arg("mode") = "paper-literal");
    m.def(
        "next_generation_matrix",
        [](const py::object& params, const std::string& mode) {
            return to_py(to_json(next_generation_matrix(params_arg(params), fmode_from_string(mode))));
        },
        py::arg("params") = py::none(), py::arg("mode") = "paper-literal");
    m.def(
        "sensitivity",
        [](const py::object& params, const std::string& method, const std::string& mode) {
            return to_py(to_json(sensitivity_table(params_arg(params), method_from_string(method),
                                                   fmode_from_string(mode))));
        },
        py::arg("params") = py::none(), py::arg("method") = "analytic",
        py::arg("mode") = "paper-literal");
    m.def(
        "dfe_stability",
        [](const py::object& params, const std::string& mode) {
            return to_py(to_json(local_dfe_stability(params_arg(params), fmode_from_string(mode))));
        },
        py::arg("params") = py::none(), py::arg("mode") = "paper-literal");

    py::class_<SyntheticDataset>(m, "Dataset")
        .def_property_readonly("times",
                               [](const SyntheticDataset& d) {
                                   return py::array_t<double>(d.times.size(), d.times.data());
                               })
        .def_property_readonly("observed",
                               [](const SyntheticDataset& d) {
                                   py::list names;
                                   for (Compartment c : d.observed) {
                                       names.append(std::string(kCompartmentNames[index_of(c)]));
                                   }
                                   return names;
                               })
        .def_property_readonly("observations",
                               [](const SyntheticDataset& d) {
                                   const std::size_t cols = d.observed.size();
                                   py::array_t<double> out({d.times.size(), cols});
                                   auto view = out.mutable_unchecked<2>();
                                   for (std::size_t i = 0; i < d.times.size(); ++i) {
                                       for (std::size_t j = 0; j < cols; ++j) {
                                           view(i, j) = d.observations[i][j];
                                       }
                                   }
                                   return out;
                               })
        .def_readonly("scales", &SyntheticDataset::scales)
        .def_readonly("noise_sd", &SyntheticDataset::noise_sd)
        .def_readonly("seed", &SyntheticDataset::seed)
        .def_property_readonly("truth", [](const SyntheticDataset& d) { return to_py(params_to_json(d.truth)); });

    m.def(
        "generate_synthetic",
        [](const py::object& params, double t_end, double step, double noise_sd, std::uint64_t seed,
           const std::string& noise_mode) {
            return generate_synthetic(params_arg(params), reference_initial_condition(),
                                      sample_grid(0.0, t_end, step), noise_sd, seed,
                                      default_observables(), noise_mode_from_string(noise_mode));
        },
        py::arg("params") = py::none(), py::arg("t_end") = 100.0, py::arg("step") = 1.0,
        py::arg("noise_sd") = 0.0, py::arg("seed") = 0, py::arg("noise_mode") = "relative");
    m.def("fit", &fit_dataset, py::arg("data"), py::arg("free"), py::arg("init") = py::none(),
          py::arg("polish") = true, py::arg("intervals") = false);

    m.def(
        "run",
        [](const std::string& command, const std::filesystem::path& out_dir, const py::object& config) {
            const ScenarioConfig cfg = scenario(config);
            if (command == "simulate") return cmd_simulate(cfg, out_dir);
            if (command == "r0") return cmd_r0(cfg, out_dir);
            if (command == "sensitivity") return cmd_sensitivity(cfg, out_dir);
            if (command == "sweep") return cmd_sweep(cfg, out_dir);
            if (command == "fit") return cmd_fit(cfg, out_dir);
            if (command == "stability") return cmd_stability(cfg, out_dir);
            throw ConfigError("unknown command \"" + command + "\"");
        },
        py::arg("command"), py::arg("out_dir"), py::arg("config") = py::none(),
        "Runs a rabies-dyn command and returns the files it wrote.");
}
