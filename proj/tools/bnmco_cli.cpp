// Command-line front end: plan, benchmark, tune, render.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bnmco/harness.hpp"
#include "bnmco/render.hpp"

namespace fs = std::filesystem;
using namespace bnmco;

namespace {

constexpr int kOk = 0;
constexpr int kPlanningFailed = 1;
constexpr int kInputError = 2;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << text;
}

std::vector<Planner> planner_list(const std::string& csv) {
  std::vector<Planner> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_planner(item));
  }
  if (out.empty()) throw InputError("no planner given");
  return out;
}

void apply_all(std::vector<Scenario>& scenarios, const std::vector<std::string>& sets) {
  for (auto& sc : scenarios) {
    for (const auto& s : sets) apply_override(sc.config, s);
    try {
      sc.config.validate(sc.robot.dof());
    } catch (const std::invalid_argument& e) {
      throw InputError(sc.name + ": " + e.what());
    }
  }
}

struct PlanArgs {
  std::string scenario;
  std::string planner = "bnmco";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "out";
  double budget = 30.0;
  std::vector<std::string> sets;
};

int cmd_plan(const PlanArgs& a) {
  std::vector<Scenario> sc{load_scenario(a.scenario)};
  apply_all(sc, a.sets);
  const Planner planner = parse_planner(a.planner);
  const std::uint64_t seed = a.seed_given ? a.seed : default_seed();

  Trajectory traj;
  Diagnostics diag;
  RunRecord rec;
  if (planner == Planner::BnMco) {
    PlanArtifacts nets;
    Rng rng(seed);
    const Deadline deadline(a.budget);
    bool ok = false;
    try {
      traj = plan(sc[0], rng, diag, deadline, &nets);
      Rng check = Rng(seed).split(0x5eed);
      std::string why;
      ok = verify_trajectory(sc[0], traj, check, &why);
      if (!ok) diag.message = "verification failed: " + why;
    } catch (const PlanningFailed& e) {
      diag = e.diagnostics();
    }
    std::ostringstream fwd, bwd;
    write_net(fwd, nets.forward);
    write_net(bwd, nets.backward);
    write_text(fs::path(a.out) / "net_forward.txt", fwd.str());
    write_text(fs::path(a.out) / "net_backward.txt", bwd.str());
    rec.success = ok;
  } else {
    rec = run_once(sc[0], planner, seed, a.budget, &traj);
    diag = rec.diagnostics;
  }
  write_text(fs::path(a.out) / "diagnostics.json", diagnostics_to_json(diag).dump(2) + "\n");
  if (!rec.success) {
    std::cerr << "planning failed";
    if (!diag.failure_phase.empty()) std::cerr << " in phase " << diag.failure_phase;
    if (!diag.message.empty()) std::cerr << ": " << diag.message;
    std::cerr << '\n';
    return kPlanningFailed;
  }
  std::ostringstream t;
  write_trajectory(t, traj);
  write_text(fs::path(a.out) / "trajectory.txt", t.str());
  std::cout << "success: " << traj.size() << " waypoints, length " << traj.length() << '\n';
  return kOk;
}

struct BenchArgs {
  std::string dir = "scenarios";
  std::string planners = "bnmco";
  int seeds = 5;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double budget = 30.0;
  int jobs = 1;
  std::string out = "results";
  std::vector<std::string> sets;
};

int cmd_benchmark(const BenchArgs& a) {
  auto scenarios = load_scenario_dir(a.dir);
  apply_all(scenarios, a.sets);
  const auto planners = planner_list(a.planners);
  const std::uint64_t base = a.seed_given ? a.seed : default_seed();
  fs::create_directories(a.out);
  std::ofstream runs(fs::path(a.out) / "runs.jsonl", std::ios::app);
  if (!runs) throw InputError(a.out + ": cannot write runs.jsonl");
  const auto records = benchmark(scenarios, planners, a.seeds, base, a.budget, a.jobs, [](const RunRecord& r) {
    std::cerr << r.scenario << ' ' << r.planner << " seed " << r.seed << (r.success ? " ok " : " fail ") << r.wall_time
              << "s\n";
  });
  for (const auto& r : records) runs << record_json(r).dump() << '\n';
  const auto rows = summarize(records);
  const std::string table = summary_table(rows);
  std::cout << table;
  write_text(fs::path(a.out) / "summary.txt", table);
  write_text(fs::path(a.out) / "summary.json", summary_json(rows).dump(2) + "\n");
  return kOk;
}

struct TuneArgs {
  std::string dir = "scenarios";
  std::string grid;
  int seeds = 5;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double budget = 30.0;
  int jobs = 1;
  std::string out = "tune";
  std::vector<std::string> sets;
};

int cmd_tune(const TuneArgs& a) {
  const auto grid = parse_grid(a.grid);
  auto scenarios = load_scenario_dir(a.dir);
  apply_all(scenarios, a.sets);
  const std::uint64_t base = a.seed_given ? a.seed : default_seed();
  const auto result = tune(scenarios, grid, a.seeds, base, a.budget, a.jobs);
  const std::string table = tune_table(result);
  std::cout << table;
  write_text(fs::path(a.out) / "tune.txt", table);
  write_text(fs::path(a.out) / "tune.json", tune_json(result).dump(2) + "\n");
  return kOk;
}

struct RenderArgs {
  std::string scenario;
  std::string trajectory;
  std::vector<std::string> nets;
  std::string out = "scene.svg";
};

int cmd_render(const RenderArgs& a) {
  const Scenario sc = load_scenario(a.scenario);
  std::optional<Trajectory> traj;
  if (!a.trajectory.empty()) {
    std::ifstream in(a.trajectory);
    if (!in) throw InputError(a.trajectory + ": cannot open file");
    traj = read_trajectory(in, sc.robot.dof(), a.trajectory);
  }
  std::vector<BayesNet> nets;
  for (const auto& n : a.nets) {
    std::ifstream in(n);
    if (!in) throw InputError(n + ": cannot open file");
    try {
      nets.push_back(read_net(in));
    } catch (const Error& e) {
      throw InputError(n + ": " + e.what());
    }
  }
  std::string svg;
  try {
    svg = render_svg(sc, traj ? &*traj : nullptr, nets);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  write_text(a.out, svg);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes-net guided Monte Carlo motion planner"};
  app.require_subcommand(1);

  PlanArgs pa;
  auto* plan_cmd = app.add_subcommand("plan", "Run one planner on one scenario");
  plan_cmd->add_option("--scenario", pa.scenario, "Scenario file")->required();
  plan_cmd->add_option("--planner", pa.planner, "bnmco, rrt-connect, prm or pf-descent");
  plan_cmd->add_option("--seed", pa.seed, "Random seed (default: BNMCO_SEED or 1)")->each([&](const std::string&) {
    pa.seed_given = true;
  });
  plan_cmd->add_option("--out", pa.out, "Output directory");
  plan_cmd->add_option("--budget", pa.budget, "Wall-clock budget in seconds");
  plan_cmd->add_option("--set", pa.sets, "Parameter override key=value (repeatable)");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run planners over a scenario directory");
  bench_cmd->add_option("--dir", ba.dir, "Scenario directory");
  bench_cmd->add_option("--planners", ba.planners, "Comma-separated planner list");
  bench_cmd->add_option("--seeds", ba.seeds, "Seeds per scenario")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", ba.seed, "First seed (default: BNMCO_SEED or 1)")->each([&](const std::string&) {
    ba.seed_given = true;
  });
  bench_cmd->add_option("--budget", ba.budget, "Wall-clock budget per run, seconds");
  bench_cmd->add_option("--jobs", ba.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", ba.out, "Output directory");
  bench_cmd->add_option("--set", ba.sets, "Parameter override key=value (repeatable)");

  TuneArgs ta;
  auto* tune_cmd = app.add_subcommand("tune", "Grid search over planner parameters");
  tune_cmd->add_option("--dir", ta.dir, "Scenario directory");
  tune_cmd->add_option("--grid", ta.grid, "Grid spec, e.g. eta_pi=0.2,0.4;eta_mu/eta_sigma=0.2/0.1,0.4/0.2")
      ->required();
  tune_cmd->add_option("--seeds", ta.seeds, "Seeds per scenario")->check(CLI::PositiveNumber);
  tune_cmd->add_option("--seed", ta.seed, "First seed (default: BNMCO_SEED or 1)")->each([&](const std::string&) {
    ta.seed_given = true;
  });
  tune_cmd->add_option("--budget", ta.budget, "Wall-clock budget per run, seconds");
  tune_cmd->add_option("--jobs", ta.jobs, "Worker threads")->check(CLI::PositiveNumber);
  tune_cmd->add_option("--out", ta.out, "Output directory");
  tune_cmd->add_option("--set", ta.sets, "Parameter override key=value (repeatable)");

  RenderArgs ra;
  auto* render_cmd = app.add_subcommand("render", "Draw a scenario as SVG");
  render_cmd->add_option("--scenario", ra.scenario, "Scenario file")->required();
  render_cmd->add_option("--trajectory", ra.trajectory, "Trajectory file");
  render_cmd->add_option("--net", ra.nets, "Net dump (repeatable)");
  render_cmd->add_option("--out", ra.out, "Output SVG file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*plan_cmd) return cmd_plan(pa);
    if (*bench_cmd) return cmd_benchmark(ba);
    if (*tune_cmd) return cmd_tune(ta);
    if (*render_cmd) return cmd_render(ra);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
