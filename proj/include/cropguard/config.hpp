#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cropguard/engine.hpp"

namespace cropguard {

/// Reads an INI-style scenario. Sections: field, placement, tree, radio,
/// species, rns, energy, sim, intrusions. Relative file references (species
/// file, calibration corpus) resolve against `base_dir`. Throws ConfigError on
/// missing required keys, unknown keys, or malformed values.
[[nodiscard]] Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// "x:y, x:y, ..." (empty string gives an empty list).
[[nodiscard]] std::vector<Point> parse_point_list(const std::string& text);
[[nodiscard]] std::string format_point_list(const std::vector<Point>& points);

/// `[radio]` section holding the model parameters, loadable by parse_scenario.
void write_pathloss_config(std::ostream& out, const PathLossModel& model);
/// `[placement]` section with strategy = explicit and the sensor list.
void write_placement_config(std::ostream& out, const Placement& placement);

}  // namespace cropguard
