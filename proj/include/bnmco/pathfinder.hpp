#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "bnmco/bayes_net.hpp"
#include "bnmco/scenario.hpp"

namespace bnmco {

/// Wall-clock limit shared by every phase of a run.
class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(double seconds)
      : end_(std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                      std::chrono::duration<double>(seconds))),
        limited_(true) {}

  bool expired() const { return limited_ && std::chrono::steady_clock::now() >= end_; }

 private:
  std::chrono::steady_clock::time_point end_{};
  bool limited_ = false;
};

class TimeBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Per-run report shared by every planner.
struct Diagnostics {
  std::string planner;
  std::string rng_algorithm;
  std::uint64_t seed = 0;
  bool success = false;
  std::string failure_phase;
  std::string message;
  int attempts = 0;
  /// Phase name and elapsed milliseconds, in execution order.
  std::vector<std::pair<std::string, double>> phase_ms;
  /// Planner-specific counters (net sizes, candidate counts, tree sizes...).
  std::vector<std::pair<std::string, double>> counters;
  std::vector<double> candidate_lengths;
  int trajectory_waypoints = 0;
  double trajectory_length = 0.0;

  void count(const std::string& name, double value);
  double counter(const std::string& name) const;
};

class PlanningFailed : public Error {
 public:
  PlanningFailed(const std::string& what, Diagnostics diag) : Error(what), diag_(std::move(diag)) {}
  const Diagnostics& diagnostics() const { return diag_; }

 private:
  Diagnostics diag_;
};

struct Trajectory {
  Matrix waypoints;  // D x T, start side first

  int size() const { return static_cast<int>(waypoints.cols()); }
  /// Configuration-space arc length.
  double length() const;
};

class SeedingFailed : public Error {
 public:
  using Error::Error;
};

/// N uniform joint-space draws; keeps those with mass under either field.
SeedSet uniform_seed(const PotentialField& fwd, const PotentialField& bwd, const RobotModel& model, int n, double rho,
                     double gamma_floor, Rng& rng);

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct Roadmap {
  std::vector<int> node_ids;  // net node id per roadmap index
  Eigen::SparseMatrix<double> weights;  // symmetric; absent entries are unreachable
  int origin = 0;

  int size() const { return static_cast<int>(node_ids.size()); }
  /// 0 on the diagonal, kUnreachable for absent entries.
  double weight(int i, int j) const;
};

class NoSatisfyingNode : public Error {
 public:
  using Error::Error;
};

/// Nodes connected to the net's origin, origin first, breadth-first.
Roadmap roadmap_construct(const BayesNet& net);

struct ShortestPaths {
  Vector lengths;                        // kUnreachable when not reachable
  std::vector<std::vector<int>> paths;   // roadmap indices, source first; empty when unreachable
};

ShortestPaths dijkstra(const Roadmap& map, int source);

struct Bridge {
  int start_index = -1;  // roadmap index on the start side
  int goal_index = -1;   // roadmap index on the goal side
  double length = 0.0;
};

class PairingFailed : public Error {
 public:
  using Error::Error;
};

/// Bridges between nodes of the two roadmaps whose cached waypoints share
/// seed identities. `map_s`/`net_s` belong to the backward (start) field.
std::vector<Bridge> pair_connections(const Roadmap& map_s, const BayesNet& net_s, const Roadmap& map_g,
                                     const BayesNet& net_g);

struct PathStep {
  FieldDirection side;
  int node;  // net node id on that side
};

struct PathCandidate {
  std::vector<PathStep> steps;  // start-side origin first
  double start_length = 0.0;
  double bridge_length = 0.0;
  double goal_length = 0.0;
  double length = 0.0;
  int bridge = -1;
  /// Every edge length along the sequence, in order, bridge included.
  std::vector<double> segments;
};

class AssemblyFailed : public Error {
 public:
  using Error::Error;
};

/// One candidate per bridge with both ends reachable, ascending by length
/// (stable, ties by bridge index).
std::vector<PathCandidate> assemble_paths(const std::vector<Bridge>& bridges, const Roadmap& map_s,
                                          const ShortestPaths& sp_s, const Roadmap& map_g, const ShortestPaths& sp_g);

/// Depth-first waypoint search along the candidate nodes. Empty when the
/// search tree is exhausted.
std::optional<Trajectory> find_trajectory(const PathCandidate& candidate, const BayesNet& net_s, const BayesNet& net_g,
                                          const World& world, const PotentialField& start_field, int cap,
                                          Rng& rng, const Deadline& deadline = {});

/// The two nets of the last attempt, for dumps and rendering.
struct PlanArtifacts {
  BayesNet backward;
  BayesNet forward;
};

/// Seeding, both expansions, roadmaps, pairing, assembly and the waypoint
/// search. Throws PlanningFailed on any failure.
Trajectory plan(const Scenario& scenario, Rng& rng, Diagnostics& diag, const Deadline& deadline = {},
                PlanArtifacts* artifacts = nullptr);

/// Every consecutive pair segment_safe, first waypoint satisfies the start
/// field, last the goal field.
bool verify_trajectory(const Scenario& scenario, const Trajectory& traj, Rng& rng, std::string* reason = nullptr);

}  // namespace bnmco
