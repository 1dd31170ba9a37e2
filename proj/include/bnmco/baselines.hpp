#pragma once

#include <vector>

#include "bnmco/pathfinder.hpp"

namespace bnmco {

/// Up to `wanted` uniform joint draws satisfying the goal field, within
/// `attempts` draws.
std::vector<Configuration> sample_goal_configurations(const Scenario& scenario, const PotentialField& goal_field,
                                                      int wanted, int attempts, Rng& rng);

/// Bidirectional RRT with the certified segment check as local planner.
Trajectory rrt_connect(const Scenario& scenario, Rng& rng, Diagnostics& diag, const Deadline& deadline = {});

/// Probabilistic roadmap plus Dijkstra from the start vertex.
Trajectory prm(const Scenario& scenario, Rng& rng, Diagnostics& diag, const Deadline& deadline = {});

/// One step of numerical potential-field descent:
/// argmin_q F(q) + (q - prev)^T A (q - prev), by finite-difference gradient
/// descent from `prev` with backtracking. `objective_trace` receives the
/// objective after every accepted inner step.
Configuration descent_step(const PotentialField& field, const Configuration& prev, const Matrix& A,
                           const BaselineConfig& cfg, std::vector<double>* objective_trace = nullptr);

/// Waypoints generated by repeated descent_step on the goal field from the
/// start configuration.
Trajectory pf_descent(const Scenario& scenario, Diagnostics& diag, const Deadline& deadline = {});

}  // namespace bnmco
