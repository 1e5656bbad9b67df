#include "rabies/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "rabies/errors.hpp"

namespace rabies {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message)
{
    throw ConfigError(path + ": " + message);
}

const json& require_object(const json& node, const std::string& path)
{
    if (!node.is_object()) {
        fail(path, "expected an object");
    }
    return node;
}

void check_keys(const json& node, const std::string& path,
                std::initializer_list<std::string_view> allowed)
{
    require_object(node, path);
    for (const auto& [key, value] : node.items()) {
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            fail(path + "." + key, "unknown key");
        }
    }
}

double number(const json& node, const std::string& path)
{
    if (!node.is_number()) {
        fail(path, "expected a number");
    }
    const double v = node.get<double>();
    if (!std::isfinite(v)) {
        fail(path, "must be finite");
    }
    return v;
}

double positive(const json& node, const std::string& path)
{
    const double v = number(node, path);
    if (!(v > 0.0)) {
        fail(path, "must be positive");
    }
    return v;
}

bool boolean(const json& node, const std::string& path)
{
    if (!node.is_boolean()) {
        fail(path, "expected true or false");
    }
    return node.get<bool>();
}

std::string string(const json& node, const std::string& path)
{
    if (!node.is_string()) {
        fail(path, "expected a string");
    }
    return node.get<std::string>();
}

std::vector<double> number_list(const json& node, const std::string& path)
{
    if (!node.is_array() || node.empty()) {
        fail(path, "expected a non-empty array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::string> string_list(const json& node, const std::string& path)
{
    if (!node.is_array()) {
        fail(path, "expected an array of strings");
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(string(node[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::string param_name(const json& node, const std::string& path)
{
    std::string name = string(node, path);
    if (!is_param_name(name)) {
        fail(path, "unknown parameter '" + name + "'");
    }
    return name;
}

std::vector<Compartment> compartments(const json& node, const std::string& path)
{
    std::vector<Compartment> out;
    for (const auto& name : string_list(node, path)) {
        auto c = compartment_from_name(name);
        if (!c) {
            fail(path, "unknown compartment '" + name + "'");
        }
        out.push_back(*c);
    }
    if (out.empty()) {
        fail(path, "at least one compartment is required");
    }
    return out;
}

Params parse_params(const json& node, const std::string& path)
{
    require_object(node, path);
    Params p = default_params();
    for (const auto& [key, value] : node.items()) {
        if (!is_param_name(key)) {
            fail(path + "." + key, "unknown parameter");
        }
        set_param(p, key, number(value, path + "." + key));
    }
    try {
        validate(p);
    } catch (const DomainError& e) {
        fail(path, e.what());
    }
    return p;
}

StateVector parse_y0(const json& node, const std::string& path)
{
    require_object(node, path);
    StateVector y = reference_initial_condition();
    for (const auto& [key, value] : node.items()) {
        auto c = compartment_from_name(key);
        if (!c) {
            fail(path + "." + key, "unknown compartment");
        }
        const double v = number(value, path + "." + key);
        if (v < 0.0) {
            fail(path + "." + key, "must be non-negative");
        }
        y[*c] = v;
    }
    return y;
}

ForcingConfig parse_forcing(const json& node, const std::string& path)
{
    check_keys(node, path, {"amplitude", "period", "phase", "targets"});
    ForcingConfig f = ForcingConfig::all_rates(0.0);
    if (node.contains("amplitude")) {
        f.amplitude = number(node["amplitude"], path + ".amplitude");
    }
    if (node.contains("period")) {
        f.period = number(node["period"], path + ".period");
    }
    if (node.contains("phase")) {
        f.phase = number(node["phase"], path + ".phase");
    }
    if (node.contains("targets")) {
        f.targets = string_list(node["targets"], path + ".targets");
    }
    try {
        f.validate();
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
    return f;
}

IntegratorConfig parse_integrator(const json& node, const std::string& path)
{
    check_keys(node, path, {"rtol", "atol", "h_init", "h_max", "max_steps"});
    IntegratorConfig cfg;
    if (node.contains("rtol")) {
        cfg.rtol = number(node["rtol"], path + ".rtol");
    }
    if (node.contains("atol")) {
        cfg.atol = number(node["atol"], path + ".atol");
    }
    if (node.contains("h_init")) {
        cfg.h_init = number(node["h_init"], path + ".h_init");
    }
    if (node.contains("h_max")) {
        cfg.h_max = number(node["h_max"], path + ".h_max");
    }
    if (node.contains("max_steps")) {
        if (!node["max_steps"].is_number_integer()) {
            fail(path + ".max_steps", "expected an integer");
        }
        cfg.max_steps = node["max_steps"].get<long>();
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
    return cfg;
}

SweepSpec parse_sweep(const json& node, const std::string& path)
{
    check_keys(node, path, {"axes", "simulate"});
    SweepSpec s;
    if (node.contains("simulate")) {
        s.simulate = boolean(node["simulate"], path + ".simulate");
    }
    if (node.contains("axes")) {
        const json& axes = node["axes"];
        if (!axes.is_array()) {
            fail(path + ".axes", "expected an array");
        }
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const std::string p = path + ".axes[" + std::to_string(i) + "]";
            check_keys(axes[i], p, {"name", "values"});
            if (!axes[i].contains("name") || !axes[i].contains("values")) {
                fail(p, "needs 'name' and 'values'");
            }
            s.axes.push_back({param_name(axes[i]["name"], p + ".name"),
                              number_list(axes[i]["values"], p + ".values")});
        }
    }
    return s;
}

GenerateSpec parse_generate(const json& node, const std::string& path)
{
    check_keys(node, path, {"t_end", "step", "noise_sd", "noise_mode", "observed"});
    GenerateSpec g;
    if (node.contains("t_end")) {
        g.t_end = positive(node["t_end"], path + ".t_end");
    }
    if (node.contains("step")) {
        g.step = positive(node["step"], path + ".step");
    }
    if (node.contains("noise_sd")) {
        g.noise_sd = number(node["noise_sd"], path + ".noise_sd");
        if (g.noise_sd < 0.0) {
            fail(path + ".noise_sd", "must be non-negative");
        }
    }
    if (node.contains("noise_mode")) {
        try {
            g.noise_mode = noise_mode_from_string(string(node["noise_mode"], path + ".noise_mode"));
        } catch (const ConfigError& e) {
            fail(path + ".noise_mode", e.what());
        }
    }
    if (node.contains("observed")) {
        g.observed = compartments(node["observed"], path + ".observed");
    }
    return g;
}

FitSpec parse_fit(const json& node, const std::string& path)
{
    check_keys(node, path,
               {"free", "init", "init_factor", "bounds", "dataset", "generate", "polish",
                "max_iterations"});
    FitSpec f;
    if (!node.contains("free")) {
        fail(path + ".free", "required");
    }
    const json& free = node["free"];
    if (!free.is_array() || free.empty()) {
        fail(path + ".free", "expected a non-empty array of parameter names");
    }
    for (std::size_t i = 0; i < free.size(); ++i) {
        f.free.push_back(param_name(free[i], path + ".free[" + std::to_string(i) + "]"));
    }
    if (node.contains("init")) {
        require_object(node["init"], path + ".init");
        for (const auto& [key, value] : node["init"].items()) {
            if (!is_param_name(key)) {
                fail(path + ".init." + key, "unknown parameter");
            }
            f.init[key] = positive(value, path + ".init." + key);
        }
    }
    if (node.contains("init_factor")) {
        f.init_factor = positive(node["init_factor"], path + ".init_factor");
    }
    if (node.contains("bounds")) {
        require_object(node["bounds"], path + ".bounds");
        for (const auto& [key, value] : node["bounds"].items()) {
            const std::string p = path + ".bounds." + key;
            if (!is_param_name(key)) {
                fail(p, "unknown parameter");
            }
            const auto pair = number_list(value, p);
            if (pair.size() != 2 || !(pair[0] > 0.0) || !(pair[1] >= pair[0])) {
                fail(p, "expected [lower, upper] with 0 < lower <= upper");
            }
            f.bounds[key] = {pair[0], pair[1]};
        }
    }
    if (node.contains("dataset")) {
        f.dataset = string(node["dataset"], path + ".dataset");
    }
    if (node.contains("generate")) {
        f.generate = parse_generate(node["generate"], path + ".generate");
    }
    if (node.contains("polish")) {
        f.polish = boolean(node["polish"], path + ".polish");
    }
    if (node.contains("max_iterations")) {
        if (!node["max_iterations"].is_number_integer() || node["max_iterations"].get<int>() < 1) {
            fail(path + ".max_iterations", "expected a positive integer");
        }
        f.max_iterations = node["max_iterations"].get<int>();
    }
    if (f.dataset && f.generate) {
        fail(path, "give either 'dataset' or 'generate', not both");
    }
    return f;
}

StabilitySpec parse_stability(const json& node, const std::string& path)
{
    check_keys(node, path, {"endemic", "horizon"});
    StabilitySpec s;
    if (node.contains("endemic")) {
        s.endemic = boolean(node["endemic"], path + ".endemic");
    }
    if (node.contains("horizon")) {
        s.horizon = positive(node["horizon"], path + ".horizon");
    }
    return s;
}

} // namespace

ScenarioConfig parse_config(const json& doc)
{
    const std::string root = "config";
    check_keys(doc, root,
               {"params", "y0", "t_span", "sample_every", "forcing", "integrator", "sweep", "fit",
                "stability", "seed", "mode"});
    ScenarioConfig cfg;
    if (doc.contains("params")) {
        cfg.params = parse_params(doc["params"], root + ".params");
    }
    if (doc.contains("y0")) {
        cfg.y0 = parse_y0(doc["y0"], root + ".y0");
    }
    if (doc.contains("t_span")) {
        const auto span = number_list(doc["t_span"], root + ".t_span");
        if (span.size() != 2 || !(span[1] > span[0])) {
            fail(root + ".t_span", "expected [t0, t1] with t1 > t0");
        }
        cfg.t0 = span[0];
        cfg.t1 = span[1];
    }
    if (doc.contains("sample_every")) {
        cfg.sample_every = positive(doc["sample_every"], root + ".sample_every");
    }
    if (doc.contains("forcing")) {
        cfg.forcing = parse_forcing(doc["forcing"], root + ".forcing");
    }
    if (doc.contains("integrator")) {
        cfg.integrator = parse_integrator(doc["integrator"], root + ".integrator");
    }
    if (doc.contains("sweep")) {
        cfg.sweep = parse_sweep(doc["sweep"], root + ".sweep");
    }
    if (doc.contains("fit")) {
        cfg.fit = parse_fit(doc["fit"], root + ".fit");
    }
    if (doc.contains("stability")) {
        cfg.stability = parse_stability(doc["stability"], root + ".stability");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) {
            fail(root + ".seed", "expected a non-negative integer");
        }
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("mode")) {
        try {
            cfg.mode = fmode_from_string(string(doc["mode"], root + ".mode"));
        } catch (const ConfigError& e) {
            fail(root + ".mode", e.what());
        }
    }
    return cfg;
}

json load_config_document(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        // Recover a line/column from the byte offset for the diagnostic.
        std::ifstream again(path);
        std::string text((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>());
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": invalid JSON");
    }
}

void apply_override(json& doc, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
    }
    std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    if (key.find('.') == std::string::npos && is_param_name(key)) {
        key = "params." + key;
    }
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    if (!doc.is_object()) {
        doc = json::object();
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot - start);
        if (part.empty()) {
            throw ConfigError("override key '" + key + "' has an empty component");
        }
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        json& child = (*node)[part];
        if (child.is_null()) {
            child = json::object();
        } else if (!child.is_object()) {
            throw ConfigError("override key '" + key + "' descends into a non-object");
        }
        node = &child;
        start = dot + 1;
    }
}

std::vector<double> sample_grid(double t0, double t1, double step)
{
    if (!(t1 > t0) || !(step > 0.0)) {
        throw ConfigError("sample grid needs t1 > t0 and a positive step");
    }
    std::vector<double> t;
    for (long k = 0;; ++k) {
        const double v = t0 + step * static_cast<double>(k);
        if (v >= t1 - 1e-9 * step) {
            break;
        }
        t.push_back(v);
    }
    t.push_back(t1);
    return t;
}

} // namespace rabies
