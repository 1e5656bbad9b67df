#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rabies/config.hpp"

namespace rabies {

/// The command implementations behind the rabies-dyn tool. Each writes its
/// artifacts into out_dir (created if missing) and returns the file names it wrote.
/// Failures are thrown; nothing is printed.

std::vector<std::string> cmd_simulate(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);
std::vector<std::string> cmd_r0(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);
std::vector<std::string> cmd_sensitivity(const ScenarioConfig& cfg,
                                         const std::filesystem::path& out_dir);
std::vector<std::string> cmd_sweep(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);
std::vector<std::string> cmd_fit(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);
std::vector<std::string> cmd_stability(const ScenarioConfig& cfg,
                                       const std::filesystem::path& out_dir);

} // namespace rabies
