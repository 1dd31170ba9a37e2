#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnmco/baselines.hpp"
#include "bnmco/io.hpp"

namespace bnmco {

enum class Planner { BnMco, RrtConnect, Prm, PfDescent };

std::string planner_name(Planner p);
/// Accepts bnmco, rrt-connect, prm, pf-descent. Throws InputError otherwise.
Planner parse_planner(const std::string& name);

/// Seed used when neither a flag nor BNMCO_SEED provides one.
inline constexpr std::uint64_t kDefaultSeed = 1;
/// BNMCO_SEED when set and numeric, `fallback` otherwise.
std::uint64_t default_seed(std::uint64_t fallback = kDefaultSeed);

struct RunRecord {
  std::string scenario;
  std::string planner;
  std::uint64_t seed = 0;
  bool reported = false;  // the planner claimed success
  bool verified = false;  // the returned trajectory passed verify_trajectory
  bool success = false;   // reported && verified
  double wall_time = 0.0;  // seconds
  double trajectory_length = 0.0;
  int waypoints = 0;
  Diagnostics diagnostics;
};

/// One planner run under a wall-clock budget, with independent
/// re-verification of any returned trajectory.
RunRecord run_once(const Scenario& scenario, Planner planner, std::uint64_t seed, double budget,
                   Trajectory* trajectory = nullptr);

/// Every (scenario, planner, seed) triple, seeds base_seed .. base_seed+K-1,
/// on `jobs` worker threads. Records are ordered by triple index.
std::vector<RunRecord> benchmark(const std::vector<Scenario>& scenarios, const std::vector<Planner>& planners,
                                 int seeds_per_scenario, std::uint64_t base_seed, double budget, int jobs = 1,
                                 const std::function<void(const RunRecord&)>& on_done = {});

struct SummaryRow {
  std::string planner;
  int runs = 0;
  int successes = 0;
  double success_rate = 0.0;  // percent
  double mean_time = 0.0;     // seconds, over all runs
  double std_time = 0.0;      // sample standard deviation, seconds
};

/// One row per planner in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
SummaryRow summarize_one(const std::string& label, const std::vector<const RunRecord*>& records);

std::string summary_table(const std::vector<SummaryRow>& rows);
nlohmann::ordered_json summary_json(const std::vector<SummaryRow>& rows);
/// `include_timing` false drops wall_time and phase timings.
nlohmann::ordered_json record_json(const RunRecord& r, bool include_timing = true);

/// A tuning axis: one or more parameter keys set together per value tuple.
struct GridAxis {
  std::vector<std::string> keys;
  std::vector<std::vector<double>> values;
  std::string label(size_t i) const;
};

/// "eta_pi=0.2,0.4;eta_mu/eta_sigma=0.2/0.1,0.4/0.2". The first axis spans
/// the columns, the optional second the rows.
std::vector<GridAxis> parse_grid(const std::string& spec);

struct TuneResult {
  GridAxis columns;
  std::optional<GridAxis> rows;
  std::vector<std::vector<SummaryRow>> cells;  // [row][column]
};

TuneResult tune(const std::vector<Scenario>& scenarios, const std::vector<GridAxis>& grid, int seeds_per_scenario,
                std::uint64_t base_seed, double budget, int jobs = 1);

std::string tune_table(const TuneResult& t);
nlohmann::ordered_json tune_json(const TuneResult& t);

/// Every *.json file of a directory, loaded in file-name order.
std::vector<Scenario> load_scenario_dir(const std::string& dir);

}  // namespace bnmco
