#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bnmco/pathfinder.hpp"
#include "bnmco/scenario.hpp"

namespace bnmco {

/// Malformed or invalid input file. The message names the file and the line
/// (syntax errors) or the JSON field path (content errors).
class InputError : public Error {
 public:
  using Error::Error;
};

Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);
std::string dump_scenario(const Scenario& scenario);

/// Apply a `key=value` override to a configuration.
void apply_override(PlannerConfig& cfg, const std::string& assignment);

/// One configuration per line, space-separated, full precision.
void write_trajectory(std::ostream& os, const Trajectory& traj);
/// Throws InputError when a line does not hold exactly `dof` numbers.
Trajectory read_trajectory(std::istream& is, int dof, const std::string& origin = "<stream>");

/// `include_timing` false drops the phase timings, which vary run to run.
nlohmann::ordered_json diagnostics_to_json(const Diagnostics& diag, bool include_timing = true);

std::string read_file(const std::filesystem::path& path);

}  // namespace bnmco
