#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bnmco/bayes_net.hpp"
#include "bnmco/environment.hpp"
#include "bnmco/kinematics.hpp"
#include "bnmco/potential_field.hpp"

namespace bnmco {

struct BaselineConfig {
  double step_size = 0.2;     // rad or m
  int max_iterations = 5000;  // RRT-Connect extend rounds
  int prm_samples = 500;
  int prm_k = 10;
  double kinetic_scale = 0.5;
  Matrix kinetic_A;  // overrides kinetic_scale * I when set
  int descent_steps = 200;
  double fd_epsilon = 1e-6;
  double descent_rate = 0.005;
  int waypoints = 20;  // T for pf_descent
  int goal_attempts = 10000;
  int goal_samples = 5;  // goal configurations found by rejection sampling

  Matrix kinetic(int dof) const;
  void validate(int dof) const;
};

/// Every tunable parameter of every planner.
struct PlannerConfig {
  CollisionParams collision;
  double tolerance = 1e-3;  // constraint satisfaction threshold
  ExpansionConfig expansion;
  int safe_point_cap = 50;
  bool retry = true;
  BaselineConfig baseline;

  void validate(int dof) const;
};

/// Set one parameter by its config key; throws std::invalid_argument on an
/// unknown key or a value of the wrong type.
void set_parameter(PlannerConfig& cfg, const std::string& key, double value);
std::vector<std::string> parameter_keys();
double get_parameter(const PlannerConfig& cfg, const std::string& key);

struct Scenario {
  std::string name;
  std::string note;
  RobotModel robot;
  std::vector<Obstacle> obstacles;
  StartConstraint start;
  GoalConstraint goal;
  PlannerConfig config;

  /// Checks robot, obstacles, constraints and that the start configuration
  /// is within limits and collision-free.
  void validate() const;

  std::shared_ptr<const World> world() const;
  PotentialField forward_field(std::shared_ptr<const World> w) const;
  PotentialField backward_field(std::shared_ptr<const World> w) const;
};

/// Goal weights when unspecified: 10 on positions, 1 on angles.
Vector default_goal_lambda(const RobotModel& robot);

}  // namespace bnmco
