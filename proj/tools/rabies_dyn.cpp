#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rabies/commands.hpp"
#include "rabies/config.hpp"
#include "rabies/errors.hpp"
#include "rabies/report.hpp"

namespace {

struct Options {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    std::string mode;
    std::vector<std::string> overrides;
};

using Command = std::vector<std::string> (*)(const rabies::ScenarioConfig&,
                                             const std::filesystem::path&);

int run(const Options& opt, Command command, CLI::App* seed_flag_owner)
{
    nlohmann::json doc = nlohmann::json::object();
    if (!opt.config.empty()) {
        doc = rabies::load_config_document(opt.config);
    }
    for (const auto& o : opt.overrides) {
        rabies::apply_override(doc, o);
    }
    if (seed_flag_owner->count("--seed") > 0) {
        doc["seed"] = opt.seed;
    }
    if (!opt.mode.empty()) {
        doc["mode"] = opt.mode;
    }
    const rabies::ScenarioConfig cfg = rabies::parse_config(doc);
    command(cfg, opt.out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rabies transmission dynamics: simulation, R0, sensitivity, sweeps, fitting, stability"};
    app.set_version_flag("--version", std::string("rabies-dyn ") + rabies::kVersion);
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", opt.out, "output directory (created if missing)");
    app.add_option("--seed", opt.seed, "RNG seed");
    app.add_option("--mode", opt.mode, "F-matrix mode")
        ->check(CLI::IsMember({"paper-literal", "corrected"}));
    app.add_option("--set", opt.overrides, "override key=value (repeatable)")
        ->allow_extra_args(false);
    app.fallthrough();

    struct Entry {
        const char* name;
        const char* help;
        Command command;
    };
    const Entry entries[] = {
        {"simulate", "integrate the model and write the trajectory", rabies::cmd_simulate},
        {"r0", "next-generation matrix and R0 in both modes", rabies::cmd_r0},
        {"sensitivity", "normalized sensitivity indices of R0", rabies::cmd_sensitivity},
        {"sweep", "R0 (and optionally outbreak size) over a parameter grid", rabies::cmd_sweep},
        {"fit", "least-squares fit to a dataset or synthetic data", rabies::cmd_fit},
        {"stability", "disease-free and endemic stability analysis", rabies::cmd_stability},
    };
    Command chosen = nullptr;
    for (const auto& e : entries) {
        app.add_subcommand(e.name, e.help)->callback([&chosen, &e] { chosen = e.command; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        return run(opt, chosen, &app);
    } catch (const rabies::StepBudgetExceeded& e) {
        std::cerr << "rabies-dyn: integration failed: " << e.what()
                  << " (last good time " << e.last_good_time() << ")\n";
    } catch (const rabies::NonFiniteState& e) {
        std::cerr << "rabies-dyn: integration failed: " << e.what()
                  << " (last good time " << e.last_good_time() << ")\n";
    } catch (const rabies::ConfigError& e) {
        std::cerr << "rabies-dyn: config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "rabies-dyn: " << e.what() << '\n';
    }
    return 1;
}
