#include "bnmco/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace bnmco {

namespace {

void start_report(Diagnostics& diag, const char* planner, const Rng* rng) {
  diag.planner = planner;
  diag.rng_algorithm = std::string(Rng::kAlgorithm);
  diag.seed = rng ? rng->seed() : 0;
  diag.attempts = 1;
}

[[noreturn]] void fail(Diagnostics& diag, const std::string& phase, const std::string& message) {
  diag.success = false;
  diag.failure_phase = phase;
  diag.message = message;
  throw PlanningFailed(message, diag);
}

Trajectory finish(Diagnostics& diag, std::vector<Configuration> pts) {
  Trajectory t;
  std::vector<Configuration> unique;
  for (auto& p : pts) {
    if (unique.empty() || unique.back() != p) unique.push_back(std::move(p));
  }
  t.waypoints.resize(unique.front().size(), static_cast<Eigen::Index>(unique.size()));
  for (size_t i = 0; i < unique.size(); ++i) t.waypoints.col(static_cast<Eigen::Index>(i)) = unique[i];
  diag.success = true;
  diag.trajectory_waypoints = t.size();
  diag.trajectory_length = t.length();
  return t;
}

Configuration uniform_configuration(const RobotModel& robot, Rng& rng) {
  Configuration q(robot.dof());
  for (int k = 0; k < robot.dof(); ++k) q[k] = rng.uniform(robot.joint_min[k], robot.joint_max[k]);
  return q;
}

bool free_configuration(const World& world, const Configuration& q) {
  return joint_limit_cost(world.robot, q) == 0.0 && waypoint_collision_field(world, q) == 0.0;
}

struct Tree {
  std::vector<Configuration> nodes;
  std::vector<int> parent;

  int add(Configuration q, int p) {
    nodes.push_back(std::move(q));
    parent.push_back(p);
    return static_cast<int>(nodes.size()) - 1;
  }
  int nearest(const Configuration& q) const {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      const double d = (nodes[i] - q).squaredNorm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  }
  std::vector<Configuration> branch(int i) const {
    std::vector<Configuration> out;
    for (; i >= 0; i = parent[i]) out.push_back(nodes[i]);
    return out;  // leaf first
  }
};

enum class Extend { Trapped, Advanced, Reached };

Extend extend(Tree& tree, const Configuration& target, double step, const World& world, Rng& rng, int& added) {
  const int near = tree.nearest(target);
  const Configuration& from = tree.nodes[near];
  const Vector d = target - from;
  const double dist = d.norm();
  const bool reach = dist <= step;
  const Configuration q = reach ? target : Configuration(from + d * (step / dist));
  if (!segment_certified(world, from, q, rng)) return Extend::Trapped;
  added = tree.add(q, near);
  return reach ? Extend::Reached : Extend::Advanced;
}

}  // namespace

std::vector<Configuration> sample_goal_configurations(const Scenario& scenario, const PotentialField& goal_field,
                                                      int wanted, int attempts, Rng& rng) {
  std::vector<Configuration> out;
  for (int a = 0; a < attempts && static_cast<int>(out.size()) < wanted; ++a) {
    Configuration q = uniform_configuration(scenario.robot, rng);
    if (is_satisfied(goal_field, q)) out.push_back(std::move(q));
  }
  return out;
}

Trajectory rrt_connect(const Scenario& scenario, Rng& rng, Diagnostics& diag, const Deadline& deadline) {
  start_report(diag, "rrt-connect", &rng);
  const BaselineConfig& cfg = scenario.config.baseline;
  const auto world = scenario.world();
  const PotentialField goal = scenario.forward_field(world);
  Rng goal_rng = rng.split(1);
  Rng tree_rng = rng.split(2);
  Rng check_rng = rng.split(3);

  const auto goals = sample_goal_configurations(scenario, goal, cfg.goal_samples, cfg.goal_attempts, goal_rng);
  diag.count("goal_configurations", static_cast<double>(goals.size()));
  if (goals.empty()) fail(diag, "goal_sampling", "no goal configuration found by rejection sampling");

  Tree start_tree, goal_tree;
  start_tree.add(scenario.start.theta0, -1);
  for (const auto& g : goals) {
    if (free_configuration(*world, g)) goal_tree.add(g, -1);
  }
  if (goal_tree.nodes.empty()) fail(diag, "goal_sampling", "no collision-free goal configuration");

  Tree* a = &start_tree;
  Tree* b = &goal_tree;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (deadline.expired()) fail(diag, "timeout", "rrt-connect exceeded the time budget");
    diag.count("iterations", it + 1);
    const Configuration q_rand = uniform_configuration(scenario.robot, tree_rng);
    int new_a = -1;
    if (extend(*a, q_rand, cfg.step_size, *world, check_rng, new_a) != Extend::Trapped) {
      const Configuration target = a->nodes[new_a];
      int new_b = -1;
      Extend r;
      do {
        r = extend(*b, target, cfg.step_size, *world, check_rng, new_b);
      } while (r == Extend::Advanced);
      if (r == Extend::Reached) {
        auto pa = a->branch(new_a);
        auto pb = b->branch(new_b);
        std::reverse(pa.begin(), pa.end());
        pa.insert(pa.end(), pb.begin() + 1, pb.end());
        if (a == &goal_tree) std::reverse(pa.begin(), pa.end());
        diag.count("start_tree", static_cast<double>(start_tree.nodes.size()));
        diag.count("goal_tree", static_cast<double>(goal_tree.nodes.size()));
        return finish(diag, std::move(pa));
      }
    }
    std::swap(a, b);
  }
  diag.count("start_tree", static_cast<double>(start_tree.nodes.size()));
  diag.count("goal_tree", static_cast<double>(goal_tree.nodes.size()));
  fail(diag, "search", "rrt-connect reached max_iterations");
}

Trajectory prm(const Scenario& scenario, Rng& rng, Diagnostics& diag, const Deadline& deadline) {
  start_report(diag, "prm", &rng);
  const BaselineConfig& cfg = scenario.config.baseline;
  const auto world = scenario.world();
  const PotentialField goal = scenario.forward_field(world);
  Rng goal_rng = rng.split(1);
  Rng vertex_rng = rng.split(2);
  Rng check_rng = rng.split(3);

  std::vector<Configuration> vertices{scenario.start.theta0};
  const auto goals = sample_goal_configurations(scenario, goal, cfg.goal_samples, cfg.goal_attempts, goal_rng);
  std::vector<int> goal_ids;
  for (const auto& g : goals) {
    if (!free_configuration(*world, g)) continue;
    goal_ids.push_back(static_cast<int>(vertices.size()));
    vertices.push_back(g);
  }
  diag.count("goal_configurations", static_cast<double>(goal_ids.size()));
  if (goal_ids.empty()) fail(diag, "goal_sampling", "no goal configuration found by rejection sampling");

  const long budget = 100L * std::max(cfg.prm_samples, 1);
  int placed = 0;
  for (long a = 0; a < budget && placed < cfg.prm_samples; ++a) {
    Configuration q = uniform_configuration(scenario.robot, vertex_rng);
    if (!free_configuration(*world, q)) continue;
    vertices.push_back(std::move(q));
    ++placed;
  }
  diag.count("vertices", static_cast<double>(vertices.size()));

  const int n = static_cast<int>(vertices.size());
  std::set<std::pair<int, int>> pairs;
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i) order.emplace_back((vertices[j] - vertices[i]).squaredNorm(), j);
    }
    const size_t k = std::min<size_t>(order.size(), static_cast<size_t>(cfg.prm_k));
    std::partial_sort(order.begin(), order.begin() + k, order.end());
    for (size_t r = 0; r < k; ++r) pairs.emplace(std::min(i, order[r].second), std::max(i, order[r].second));
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& [i, j] : pairs) {
    if (deadline.expired()) fail(diag, "timeout", "prm exceeded the time budget");
    if (segment_certified(*world, vertices[i], vertices[j], check_rng)) {
      const double w = (vertices[j] - vertices[i]).norm();
      trip.emplace_back(i, j, w);
      trip.emplace_back(j, i, w);
    }
  }
  Roadmap map;
  map.node_ids.resize(n);
  for (int i = 0; i < n; ++i) map.node_ids[i] = i;
  map.weights.resize(n, n);
  map.weights.setFromTriplets(trip.begin(), trip.end());
  diag.count("edges", static_cast<double>(map.weights.nonZeros() / 2));

  const ShortestPaths sp = dijkstra(map, 0);
  int best = -1;
  for (int g : goal_ids) {
    if (sp.lengths[g] != kUnreachable && (best < 0 || sp.lengths[g] < sp.lengths[best])) best = g;
  }
  if (best < 0) fail(diag, "search", "no goal vertex is connected to the start");
  std::vector<Configuration> pts;
  for (int v : sp.paths[best]) pts.push_back(vertices[v]);
  return finish(diag, std::move(pts));
}

namespace {

double objective(const PotentialField& field, const Configuration& q, const Configuration& prev, const Matrix& A) {
  const double f = field_value(field, q);
  if (is_infinite_cost(f)) return kInfiniteCost;
  const Vector d = q - prev;
  return f + d.dot(A * d);
}

}  // namespace

Configuration descent_step(const PotentialField& field, const Configuration& prev, const Matrix& A,
                           const BaselineConfig& cfg, std::vector<double>* objective_trace) {
  Configuration q = prev;
  double fq = objective(field, q, prev, A);
  if (objective_trace) objective_trace->push_back(fq);
  if (is_infinite_cost(fq)) return q;
  const double h = cfg.fd_epsilon;
  Vector grad(q.size());
  for (int it = 0; it < cfg.descent_steps; ++it) {
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      Configuration hi = q, lo = q;
      hi[k] += h;
      lo[k] -= h;
      const double fh = objective(field, hi, prev, A);
      const double fl = objective(field, lo, prev, A);
      if (!is_infinite_cost(fh) && !is_infinite_cost(fl)) {
        grad[k] = (fh - fl) / (2 * h);
      } else if (!is_infinite_cost(fh)) {
        grad[k] = (fh - fq) / h;
      } else if (!is_infinite_cost(fl)) {
        grad[k] = (fq - fl) / h;
      } else {
        grad[k] = 0.0;
      }
    }
    double rate = cfg.descent_rate;
    bool moved = false;
    for (int halving = 0; halving < 30; ++halving, rate *= 0.5) {
      const Configuration cand = q - rate * grad;
      const double fc = objective(field, cand, prev, A);
      if (fc < fq) {
        const double gain = fq - fc;
        q = cand;
        fq = fc;
        moved = gain >= 1e-9;
        if (objective_trace) objective_trace->push_back(fq);
        break;
      }
    }
    if (!moved) break;
  }
  return q;
}

Trajectory pf_descent(const Scenario& scenario, Diagnostics& diag, const Deadline& deadline) {
  start_report(diag, "pf-descent", nullptr);
  const BaselineConfig& cfg = scenario.config.baseline;
  const auto world = scenario.world();
  const PotentialField goal = scenario.forward_field(world);
  const PotentialField start = scenario.backward_field(world);
  const Matrix A = cfg.kinetic(scenario.robot.dof());
  const int T = cfg.waypoints;
  const int mid = T / 2;

  std::vector<Configuration> theta(T + 1);
  theta[mid] = scenario.start.theta0;
  for (int t = mid - 1; t >= 0; --t) theta[t] = descent_step(start, theta[t + 1], A, cfg);
  int last = mid;
  for (int t = mid + 1; t <= T; ++t) {
    if (deadline.expired()) fail(diag, "timeout", "pf-descent exceeded the time budget");
    theta[t] = descent_step(goal, theta[t - 1], A, cfg);
    last = t;
    if (is_satisfied(goal, theta[t])) break;
    if ((theta[t] - theta[t - 1]).norm() < 1e-9) break;
  }
  diag.count("waypoints_generated", last + 1);
  if (!is_satisfied(goal, theta[last])) fail(diag, "stall", "descent stalled before reaching the goal");

  std::vector<Configuration> pts;
  for (int t = 0; t <= last; ++t) pts.push_back(theta[t]);
  if (!is_satisfied(start, pts.front())) fail(diag, "stall", "backward descent left the start region");
  Rng check_rng(0);
  for (size_t t = 0; t + 1 < pts.size(); ++t) {
    if (pts[t] == pts[t + 1]) continue;
    if (!segment_certified(*world, pts[t], pts[t + 1], check_rng)) {
      fail(diag, "unsafe_segment", "descent produced a colliding segment");
    }
  }
  return finish(diag, std::move(pts));
}

}  // namespace bnmco
