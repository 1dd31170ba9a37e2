#include "bnmco/pathfinder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>

namespace bnmco {

void Diagnostics::count(const std::string& name, double value) {
  for (auto& [k, v] : counters) {
    if (k == name) {
      v = value;
      return;
    }
  }
  counters.emplace_back(name, value);
}

double Diagnostics::counter(const std::string& name) const {
  for (const auto& [k, v] : counters) {
    if (k == name) return v;
  }
  return 0.0;
}

double Trajectory::length() const {
  double total = 0.0;
  for (int t = 1; t < size(); ++t) total += (waypoints.col(t) - waypoints.col(t - 1)).norm();
  return total;
}

SeedSet uniform_seed(const PotentialField& fwd, const PotentialField& bwd, const RobotModel& model, int n, double rho,
                     double gamma_floor, Rng& rng) {
  if (n < 2) throw std::invalid_argument("uniform_seed: N must be >= 2");
  const int d = model.dof();
  Matrix draws(d, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) draws(k, i) = rng.uniform(model.joint_min[k], model.joint_max[k]);
  }
  Vector pf(n), pb(n);
  for (int i = 0; i < n; ++i) {
    pf[i] = density_from_value(field_value(fwd, draws.col(i)), rho);
    pb[i] = density_from_value(field_value(bwd, draws.col(i)), rho);
  }
  const double cut_f = gamma_floor * pf.maxCoeff();
  const double cut_b = gamma_floor * pb.maxCoeff();
  SeedSet out;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if ((pf[i] > 0 && pf[i] > cut_f) || (pb[i] > 0 && pb[i] > cut_b)) keep.push_back(i);
  }
  if (keep.empty()) throw SeedingFailed("uniform_seed: every seed waypoint was deleted");
  out.points.resize(d, static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c) out.points.col(static_cast<Eigen::Index>(c)) = draws.col(keep[c]);
  out.ids = keep;
  return out;
}

double Roadmap::weight(int i, int j) const {
  if (i == j) return 0.0;
  for (Eigen::SparseMatrix<double>::InnerIterator it(weights, j); it; ++it) {
    if (it.row() == i) return it.value();
  }
  return kUnreachable;
}

Roadmap roadmap_construct(const BayesNet& net) {
  if (!net.terminated || net.origin < 0 || net.origin >= static_cast<int>(net.nodes.size())) {
    throw NoSatisfyingNode("roadmap: the net has no satisfying node");
  }
  const int n = static_cast<int>(net.nodes.size());
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : net.edges) {
    adj[e.from].emplace_back(e.to, e.length);
    adj[e.to].emplace_back(e.from, e.length);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  Roadmap map;
  std::vector<int> index(n, -1);
  std::queue<int> frontier;
  index[net.origin] = 0;
  map.node_ids.push_back(net.origin);
  frontier.push(net.origin);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (const auto& [v, w] : adj[u]) {
      if (index[v] >= 0) continue;
      index[v] = map.size();
      map.node_ids.push_back(v);
      frontier.push(v);
    }
  }

  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : net.edges) {
    const int a = index[e.from], b = index[e.to];
    if (a < 0 || b < 0) continue;
    trip.emplace_back(a, b, e.length);
    trip.emplace_back(b, a, e.length);
  }
  map.weights.resize(map.size(), map.size());
  map.weights.setFromTriplets(trip.begin(), trip.end());
  map.origin = 0;
  return map;
}

ShortestPaths dijkstra(const Roadmap& map, int source) {
  const int n = map.size();
  if (source < 0 || source >= n) throw std::invalid_argument("dijkstra: source out of range");
  ShortestPaths sp;
  sp.lengths = Vector::Constant(n, kUnreachable);
  sp.paths.assign(n, {});
  std::vector<int> pred(n, -1);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  sp.lengths[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (Eigen::SparseMatrix<double>::InnerIterator it(map.weights, u); it; ++it) {
      const int v = static_cast<int>(it.row());
      const double nd = d + it.value();
      if (nd < sp.lengths[v]) {
        sp.lengths[v] = nd;
        pred[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (sp.lengths[v] == kUnreachable) continue;
    for (int x = v; x != -1; x = pred[x]) sp.paths[v].push_back(x);
    std::reverse(sp.paths[v].begin(), sp.paths[v].end());
  }
  return sp;
}

std::vector<Bridge> pair_connections(const Roadmap& map_s, const BayesNet& net_s, const Roadmap& map_g,
                                     const BayesNet& net_g) {
  std::vector<Bridge> out;
  for (int i = 0; i < map_s.size(); ++i) {
    const NetNode& a = net_s.nodes[map_s.node_ids[i]];
    if (a.seed_ids.empty()) continue;
    std::vector<int> ids_a = a.seed_ids;
    std::sort(ids_a.begin(), ids_a.end());
    for (int j = 0; j < map_g.size(); ++j) {
      const NetNode& b = net_g.nodes[map_g.node_ids[j]];
      bool shared = false;
      CompensatedSum<double> mass;
      for (size_t t = 0; t < b.seed_ids.size(); ++t) {
        if (std::binary_search(ids_a.begin(), ids_a.end(), b.seed_ids[t])) {
          shared = true;
          if (t < b.seed_mass.size()) mass.add(b.seed_mass[t]);
        }
      }
      if (!shared) continue;
      double length;
      if (mass.value() > 0) {
        length = std::max(-std::log(mass.value()), 0.0);
      } else {
        length = std::max(-0.5 * std::log(a.importance * b.importance), 0.0);
      }
      out.push_back({i, j, length});
    }
  }
  if (out.empty()) throw PairingFailed("pairing: the two nets share no seed waypoints");
  return out;
}

std::vector<PathCandidate> assemble_paths(const std::vector<Bridge>& bridges, const Roadmap& map_s,
                                          const ShortestPaths& sp_s, const Roadmap& map_g, const ShortestPaths& sp_g) {
  std::vector<PathCandidate> out;
  for (int b = 0; b < static_cast<int>(bridges.size()); ++b) {
    const Bridge& br = bridges[b];
    if (sp_s.lengths[br.start_index] == kUnreachable || sp_g.lengths[br.goal_index] == kUnreachable) continue;
    PathCandidate c;
    c.bridge = b;
    c.start_length = sp_s.lengths[br.start_index];
    c.bridge_length = br.length;
    c.goal_length = sp_g.lengths[br.goal_index];
    c.length = c.start_length + c.bridge_length + c.goal_length;
    const auto& ps = sp_s.paths[br.start_index];
    for (size_t t = 0; t < ps.size(); ++t) {
      c.steps.push_back({FieldDirection::Backward, map_s.node_ids[ps[t]]});
      if (t > 0) c.segments.push_back(map_s.weight(ps[t - 1], ps[t]));
    }
    c.segments.push_back(br.length);
    const auto& pg = sp_g.paths[br.goal_index];
    for (size_t t = pg.size(); t-- > 0;) {
      c.steps.push_back({FieldDirection::Forward, map_g.node_ids[pg[t]]});
      if (t > 0) c.segments.push_back(map_g.weight(pg[t], pg[t - 1]));
    }
    out.push_back(std::move(c));
  }
  if (out.empty()) throw AssemblyFailed("assembly: no bridge is reachable from both origins");
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.length < y.length; });
  return out;
}

namespace {

class WaypointSearch {
 public:
  WaypointSearch(std::vector<const NetNode*> nodes, const World& world, int cap, Rng& rng, const Deadline& deadline)
      : nodes_(std::move(nodes)), world_(world), cap_(cap), rng_(rng), deadline_(deadline), chosen_(nodes_.size()) {
    for (const auto* n : nodes_) dead_.emplace_back(n->waypoints.cols(), 0);
  }

  std::optional<Trajectory> run(const std::vector<int>& starts) {
    for (int w : starts) {
      if (dead_[0][w]) continue;
      if (extend(0, w)) return collect();
      dead_[0][w] = 1;
    }
    return std::nullopt;
  }

 private:
  bool extend(int pos, int w) {
    if (deadline_.expired()) throw TimeBudgetExceeded("trajectory search exceeded the time budget");
    chosen_[pos] = w;
    const int last = static_cast<int>(nodes_.size()) - 1;
    if (pos == last) return true;
    const NetNode& next = *nodes_[pos + 1];
    const Configuration cur = nodes_[pos]->waypoints.col(w);

    std::vector<int> pool;
    if (pos + 1 == last) {
      pool = next.satisfying;
    } else {
      pool.resize(next.waypoints.cols());
      std::iota(pool.begin(), pool.end(), 0);
    }
    std::vector<std::pair<double, int>> order;
    order.reserve(pool.size());
    for (int c : pool) {
      if (!dead_[pos + 1][c]) order.emplace_back((next.waypoints.col(c) - cur).squaredNorm(), c);
    }
    std::sort(order.begin(), order.end());
    int tried = 0;
    for (size_t r = 0; r < order.size() && tried < cap_; ++r) {
      const int c = order[r].second;
      if (dead_[pos + 1][c]) continue;
      if (!segment_certified(world_, cur, next.waypoints.col(c), rng_)) continue;
      ++tried;
      if (extend(pos + 1, c)) return true;
      dead_[pos + 1][c] = 1;
    }
    return false;
  }

  Trajectory collect() const {
    std::vector<Configuration> pts;
    for (size_t p = 0; p < nodes_.size(); ++p) {
      const Configuration q = nodes_[p]->waypoints.col(chosen_[p]);
      if (!pts.empty() && pts.back() == q) continue;
      pts.push_back(q);
    }
    Trajectory t;
    t.waypoints.resize(nodes_.front()->waypoints.rows(), static_cast<Eigen::Index>(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i) t.waypoints.col(static_cast<Eigen::Index>(i)) = pts[i];
    return t;
  }

  std::vector<const NetNode*> nodes_;
  const World& world_;
  int cap_;
  Rng& rng_;
  const Deadline& deadline_;
  std::vector<int> chosen_;
  std::vector<std::vector<char>> dead_;
};

}  // namespace

std::optional<Trajectory> find_trajectory(const PathCandidate& candidate, const BayesNet& net_s, const BayesNet& net_g,
                                          const World& world, const PotentialField& start_field, int cap,
                                          Rng& rng, const Deadline& deadline) {
  if (candidate.steps.empty()) return std::nullopt;
  std::vector<const NetNode*> nodes;
  for (const auto& s : candidate.steps) {
    const BayesNet& net = s.side == FieldDirection::Backward ? net_s : net_g;
    const NetNode* n = &net.nodes.at(s.node);
    if (n->waypoints.cols() == 0) return std::nullopt;
    nodes.push_back(n);
  }
  const NetNode& first = *nodes.front();
  std::vector<std::pair<double, int>> ranked;
  for (int w : first.satisfying) ranked.emplace_back(start_field.penalty(first.waypoints.col(w)), w);
  std::stable_sort(ranked.begin(), ranked.end());
  if (static_cast<int>(ranked.size()) > cap) ranked.resize(cap);
  std::vector<int> starts;
  for (const auto& r : ranked) starts.push_back(r.second);

  if (nodes.size() == 1) {
    const std::vector<int>& sat = first.satisfying;
    for (int w : starts) {
      if (std::find(sat.begin(), sat.end(), w) != sat.end()) {
        return Trajectory{first.waypoints.col(w)};
      }
    }
    return std::nullopt;
  }
  WaypointSearch search(std::move(nodes), world, cap, rng, deadline);
  return search.run(starts);
}

namespace {

class PhaseClock {
 public:
  explicit PhaseClock(Diagnostics& d) : diag_(d) {}
  void begin(const std::string& phase) {
    phase_ = phase;
    open_ = true;
    start_ = std::chrono::steady_clock::now();
  }
  void end() {
    if (!open_) return;
    open_ = false;
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    diag_.phase_ms.emplace_back(phase_, ms);
  }
  const std::string& phase() const { return phase_; }

 private:
  Diagnostics& diag_;
  std::string phase_;
  bool open_ = false;
  std::chrono::steady_clock::time_point start_;
};

BayesNet expand(const PotentialField& pf, const SeedSet& seeds, const ExpansionConfig& cfg, Rng rng,
                const Deadline& deadline) {
  NetExpansion ex(pf, seeds, cfg, std::move(rng));
  while (!ex.done()) {
    if (deadline.expired()) throw TimeBudgetExceeded("expansion exceeded the time budget");
    ex.step();
  }
  return std::move(ex).release();
}

}  // namespace

Trajectory plan(const Scenario& scenario, Rng& rng, Diagnostics& diag, const Deadline& deadline,
                PlanArtifacts* artifacts) {
  diag.planner = "bnmco";
  diag.rng_algorithm = std::string(Rng::kAlgorithm);
  diag.seed = rng.seed();
  const auto world = scenario.world();
  const PotentialField fwd = scenario.forward_field(world);
  const PotentialField bwd = scenario.backward_field(world);
  const PlannerConfig& cfg = scenario.config;
  const int attempts = cfg.retry ? 2 : 1;
  PhaseClock clock(diag);

  for (int a = 0; a < attempts; ++a) {
    diag.attempts = a + 1;
    ExpansionConfig ecfg = cfg.expansion;
    ecfg.samples = cfg.expansion.samples << a;
    const std::uint64_t base = 16 * static_cast<std::uint64_t>(a);
    try {
      clock.begin("seed");
      Rng seed_rng = rng.split(base + 1);
      const SeedSet seeds = uniform_seed(fwd, bwd, scenario.robot, ecfg.samples, ecfg.rho0, ecfg.gamma_floor, seed_rng);
      diag.count("seeds", static_cast<double>(seeds.ids.size()));
      clock.end();

      clock.begin("expand_backward");
      const BayesNet net_s = expand(bwd, seeds, ecfg, rng.split(base + 2), deadline);
      diag.count("backward_nodes", static_cast<double>(net_s.nodes.size()));
      diag.count("backward_edges", static_cast<double>(net_s.edges.size()));
      diag.count("backward_iterations", net_s.iterations);
      if (artifacts) artifacts->backward = net_s;
      clock.end();

      clock.begin("expand_forward");
      const BayesNet net_g = expand(fwd, seeds, ecfg, rng.split(base + 3), deadline);
      diag.count("forward_nodes", static_cast<double>(net_g.nodes.size()));
      diag.count("forward_edges", static_cast<double>(net_g.edges.size()));
      diag.count("forward_iterations", net_g.iterations);
      if (artifacts) artifacts->forward = net_g;
      clock.end();

      clock.begin("roadmap");
      const Roadmap map_s = roadmap_construct(net_s);
      const Roadmap map_g = roadmap_construct(net_g);
      diag.count("roadmap_start", map_s.size());
      diag.count("roadmap_goal", map_g.size());
      const ShortestPaths sp_s = dijkstra(map_s, map_s.origin);
      const ShortestPaths sp_g = dijkstra(map_g, map_g.origin);
      clock.end();

      std::vector<PathCandidate> candidates;
      try {
        clock.begin("pairing");
        const auto bridges = pair_connections(map_s, net_s, map_g, net_g);
        diag.count("bridges", static_cast<double>(bridges.size()));
        clock.end();
        clock.begin("assembly");
        candidates = assemble_paths(bridges, map_s, sp_s, map_g, sp_g);
        diag.count("candidates", static_cast<double>(candidates.size()));
        diag.candidate_lengths.clear();
        for (const auto& c : candidates) diag.candidate_lengths.push_back(c.length);
        clock.end();
      } catch (const PairingFailed&) {
        clock.end();
        if (a + 1 < attempts) continue;
        throw;
      } catch (const AssemblyFailed&) {
        clock.end();
        if (a + 1 < attempts) continue;
        throw;
      }

      clock.begin("trajectory");
      Rng traj_rng = rng.split(base + 4);
      int tried = 0;
      for (const auto& c : candidates) {
        ++tried;
        diag.count("candidates_tried", tried);
        auto traj = find_trajectory(c, net_s, net_g, *world, bwd, cfg.safe_point_cap, traj_rng, deadline);
        if (traj) {
          clock.end();
          diag.success = true;
          diag.trajectory_waypoints = traj->size();
          diag.trajectory_length = traj->length();
          return *traj;
        }
      }
      clock.end();
      diag.failure_phase = "trajectory";
      diag.message = "every path candidate was exhausted";
      throw PlanningFailed(diag.message, diag);
    } catch (const PlanningFailed&) {
      throw;
    } catch (const Error& e) {
      clock.end();
      diag.failure_phase = dynamic_cast<const TimeBudgetExceeded*>(&e) ? "timeout" : clock.phase();
      diag.message = e.what();
      throw PlanningFailed(e.what(), diag);
    }
  }
  diag.failure_phase = "assembly";
  diag.message = "no attempt produced path candidates";
  throw PlanningFailed(diag.message, diag);
}

bool verify_trajectory(const Scenario& scenario, const Trajectory& traj, Rng& rng, std::string* reason) {
  auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  if (traj.size() == 0) return fail("empty trajectory");
  if (traj.waypoints.rows() != scenario.robot.dof()) return fail("wrong configuration dimension");
  const auto world = scenario.world();
  if (!is_satisfied(scenario.backward_field(world), traj.waypoints.col(0))) return fail("first waypoint misses the start");
  if (!is_satisfied(scenario.forward_field(world), traj.waypoints.col(traj.size() - 1))) {
    return fail("last waypoint misses the goal");
  }
  for (int t = 0; t + 1 < traj.size(); ++t) {
    if (!segment_safe(*world, traj.waypoints.col(t), traj.waypoints.col(t + 1), rng)) {
      return fail("segment " + std::to_string(t) + " is not safe");
    }
  }
  if (traj.size() == 1 && !segment_safe(*world, traj.waypoints.col(0), traj.waypoints.col(0), rng)) {
    return fail("single waypoint is not safe");
  }
  return true;
}

}  // namespace bnmco
