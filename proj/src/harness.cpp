#include "bnmco/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace bnmco {

using nlohmann::ordered_json;

std::string planner_name(Planner p) {
  switch (p) {
    case Planner::BnMco:
      return "bnmco";
    case Planner::RrtConnect:
      return "rrt-connect";
    case Planner::Prm:
      return "prm";
    case Planner::PfDescent:
      return "pf-descent";
  }
  return "unknown";
}

Planner parse_planner(const std::string& name) {
  for (Planner p : {Planner::BnMco, Planner::RrtConnect, Planner::Prm, Planner::PfDescent}) {
    if (planner_name(p) == name) return p;
  }
  throw InputError("unknown planner '" + name + "' (expected bnmco, rrt-connect, prm or pf-descent)");
}

std::uint64_t default_seed(std::uint64_t fallback) {
  const char* env = std::getenv("BNMCO_SEED");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end && *end == '\0') return v;
  return fallback;
}

RunRecord run_once(const Scenario& scenario, Planner planner, std::uint64_t seed, double budget, Trajectory* out) {
  RunRecord r;
  r.scenario = scenario.name;
  r.planner = planner_name(planner);
  r.seed = seed;
  const Deadline deadline(budget);
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Trajectory> traj;
  Rng rng(seed);
  try {
    switch (planner) {
      case Planner::BnMco:
        traj = plan(scenario, rng, r.diagnostics, deadline);
        break;
      case Planner::RrtConnect:
        traj = rrt_connect(scenario, rng, r.diagnostics, deadline);
        break;
      case Planner::Prm:
        traj = prm(scenario, rng, r.diagnostics, deadline);
        break;
      case Planner::PfDescent:
        traj = pf_descent(scenario, r.diagnostics, deadline);
        r.diagnostics.seed = seed;
        break;
    }
  } catch (const PlanningFailed& e) {
    r.diagnostics = e.diagnostics();
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.reported = traj.has_value();
  if (traj) {
    Rng check = Rng(seed).split(0x5eed);
    std::string why;
    r.verified = verify_trajectory(scenario, *traj, check, &why);
    if (!r.verified) r.diagnostics.message = "verification failed: " + why;
    r.trajectory_length = traj->length();
    r.waypoints = traj->size();
    if (out) *out = *traj;
  }
  r.success = r.reported && r.verified;
  if (r.diagnostics.failure_phase == "timeout" || (!r.success && r.wall_time > budget)) r.wall_time = budget;
  return r;
}

std::vector<RunRecord> benchmark(const std::vector<Scenario>& scenarios, const std::vector<Planner>& planners,
                                 int seeds_per_scenario, std::uint64_t base_seed, double budget, int jobs,
                                 const std::function<void(const RunRecord&)>& on_done) {
  struct Triple {
    const Scenario* scenario;
    Planner planner;
    std::uint64_t seed;
  };
  std::vector<Triple> triples;
  for (const auto& sc : scenarios) {
    for (Planner p : planners) {
      for (int s = 0; s < seeds_per_scenario; ++s) triples.push_back({&sc, p, base_seed + static_cast<std::uint64_t>(s)});
    }
  }
  std::vector<RunRecord> records(triples.size());
  std::atomic<size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < triples.size();) {
      records[i] = run_once(*triples[i].scenario, triples[i].planner, triples[i].seed, budget);
      if (on_done) {
        std::lock_guard lock(report);
        on_done(records[i]);
      }
    }
  };
  const int n = std::max(1, jobs);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

SummaryRow summarize_one(const std::string& label, const std::vector<const RunRecord*>& records) {
  SummaryRow row;
  row.planner = label;
  row.runs = static_cast<int>(records.size());
  double sum = 0.0;
  for (const auto* r : records) {
    row.successes += r->success ? 1 : 0;
    sum += r->wall_time;
  }
  if (row.runs == 0) return row;
  row.success_rate = 100.0 * row.successes / row.runs;
  row.mean_time = sum / row.runs;
  if (row.runs > 1) {
    double ss = 0.0;
    for (const auto* r : records) ss += (r->wall_time - row.mean_time) * (r->wall_time - row.mean_time);
    row.std_time = std::sqrt(ss / (row.runs - 1));
  }
  return row;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::vector<std::string> order;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.planner) == order.end()) order.push_back(r.planner);
  }
  std::vector<SummaryRow> rows;
  for (const auto& p : order) {
    std::vector<const RunRecord*> group;
    for (const auto& r : records) {
      if (r.planner == p) group.push_back(&r);
    }
    rows.push_back(summarize_one(p, group));
  }
  return rows;
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "planner" << std::right << std::setw(8) << "runs" << std::setw(14)
     << "success (%)" << std::setw(14) << "mean (s)" << std::setw(14) << "std (s)" << '\n';
  os << std::fixed;
  for (const auto& r : rows) {
    os << std::left << std::setw(14) << r.planner << std::right << std::setw(8) << r.runs << std::setw(14)
       << std::setprecision(2) << r.success_rate << std::setw(14) << std::setprecision(3) << r.mean_time
       << std::setw(14) << r.std_time << '\n';
  }
  return os.str();
}

ordered_json summary_json(const std::vector<SummaryRow>& rows) {
  ordered_json a = ordered_json::array();
  for (const auto& r : rows) {
    a.push_back({{"planner", r.planner},
                 {"runs", r.runs},
                 {"successes", r.successes},
                 {"success_rate", r.success_rate},
                 {"mean_time", r.mean_time},
                 {"std_time", r.std_time}});
  }
  return a;
}

ordered_json record_json(const RunRecord& r, bool include_timing) {
  ordered_json j;
  j["scenario"] = r.scenario;
  j["planner"] = r.planner;
  j["seed"] = r.seed;
  j["success"] = r.success;
  j["reported"] = r.reported;
  j["verified"] = r.verified;
  if (include_timing) j["wall_time"] = r.wall_time;
  j["trajectory_length"] = r.trajectory_length;
  j["waypoints"] = r.waypoints;
  j["diagnostics"] = diagnostics_to_json(r.diagnostics, include_timing);
  return j;
}

std::string GridAxis::label(size_t i) const {
  std::ostringstream os;
  for (size_t k = 0; k < keys.size(); ++k) {
    if (k) os << '/';
    os << values[i][k];
  }
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

std::vector<GridAxis> parse_grid(const std::string& spec) {
  std::vector<GridAxis> axes;
  for (const auto& part : split(spec, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw InputError("grid axis '" + part + "': expected keys=values");
    GridAxis axis;
    axis.keys = split(part.substr(0, eq), '/');
    const PlannerConfig probe;
    for (const auto& k : axis.keys) {
      try {
        (void)get_parameter(probe, k);
      } catch (const std::invalid_argument& e) {
        throw InputError("grid axis '" + part + "': " + e.what());
      }
    }
    for (const auto& tuple : split(part.substr(eq + 1), ',')) {
      if (tuple.empty()) continue;
      std::vector<double> vals;
      for (const auto& v : split(tuple, '/')) {
        try {
          size_t used = 0;
          vals.push_back(std::stod(v, &used));
          if (used != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
          throw InputError("grid axis '" + part + "': '" + v + "' is not a number");
        }
      }
      if (vals.size() != axis.keys.size()) {
        throw InputError("grid axis '" + part + "': value '" + tuple + "' does not match the key count");
      }
      axis.values.push_back(vals);
    }
    if (axis.values.empty()) throw InputError("grid axis '" + part + "' has no values");
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw InputError("empty grid");
  if (axes.size() > 2) throw InputError("grid: at most two axes");
  return axes;
}

TuneResult tune(const std::vector<Scenario>& scenarios, const std::vector<GridAxis>& grid, int seeds_per_scenario,
                std::uint64_t base_seed, double budget, int jobs) {
  if (grid.empty()) throw InputError("empty grid");
  TuneResult t;
  t.columns = grid[0];
  if (grid.size() > 1) t.rows = grid[1];
  const size_t nr = t.rows ? t.rows->values.size() : 1;
  const size_t nc = t.columns.values.size();
  t.cells.assign(nr, std::vector<SummaryRow>(nc));
  for (size_t r = 0; r < nr; ++r) {
    for (size_t c = 0; c < nc; ++c) {
      std::vector<Scenario> cell = scenarios;
      for (auto& sc : cell) {
        for (size_t k = 0; k < t.columns.keys.size(); ++k) set_parameter(sc.config, t.columns.keys[k], t.columns.values[c][k]);
        if (t.rows) {
          for (size_t k = 0; k < t.rows->keys.size(); ++k) set_parameter(sc.config, t.rows->keys[k], t.rows->values[r][k]);
        }
        sc.config.validate(sc.robot.dof());
      }
      const auto recs = benchmark(cell, {Planner::BnMco}, seeds_per_scenario, base_seed, budget, jobs);
      std::vector<const RunRecord*> ptrs;
      for (const auto& x : recs) ptrs.push_back(&x);
      t.cells[r][c] = summarize_one(t.columns.label(c), ptrs);
    }
  }
  return t;
}

namespace {

std::string axis_name(const GridAxis& a) {
  std::string s;
  for (size_t k = 0; k < a.keys.size(); ++k) s += (k ? "/" : "") + a.keys[k];
  return s;
}

}  // namespace

std::string tune_table(const TuneResult& t) {
  std::ostringstream os;
  const std::string corner = (t.rows ? axis_name(*t.rows) + " \\ " : std::string()) + axis_name(t.columns);
  const int w0 = static_cast<int>(std::max<size_t>(corner.size(), 12)) + 2;
  constexpr int w = 18;
  os << std::left << std::setw(w0) << corner << std::right;
  for (size_t c = 0; c < t.columns.values.size(); ++c) os << std::setw(w) << t.columns.label(c);
  os << '\n';
  for (size_t r = 0; r < t.cells.size(); ++r) {
    os << std::left << std::setw(w0) << (t.rows ? t.rows->label(r) : std::string("all")) << std::right;
    for (const auto& cell : t.cells[r]) {
      std::ostringstream c;
      c << std::fixed << std::setprecision(1) << cell.success_rate << "% | " << std::setprecision(2) << cell.mean_time
        << "s";
      os << std::setw(w) << c.str();
    }
    os << '\n';
  }
  return os.str();
}

ordered_json tune_json(const TuneResult& t) {
  ordered_json j;
  j["columns"] = {{"keys", t.columns.keys}, {"values", t.columns.values}};
  if (t.rows) j["rows"] = {{"keys", t.rows->keys}, {"values", t.rows->values}};
  ordered_json cells = ordered_json::array();
  for (const auto& row : t.cells) cells.push_back(summary_json(row));
  j["cells"] = cells;
  return j;
}

std::vector<Scenario> load_scenario_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError(dir + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) out.push_back(load_scenario(f));
  if (out.empty()) throw InputError(dir + ": no scenario files");
  return out;
}

}  // namespace bnmco
