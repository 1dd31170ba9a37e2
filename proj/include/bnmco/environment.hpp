#pragma once

#include <span>
#include <variant>
#include <vector>

#include "bnmco/kinematics.hpp"
#include "bnmco/rng.hpp"
#include "bnmco/types.hpp"

namespace bnmco {

struct Circle {
  Vector2 center;
  double radius;
};

struct Box {
  Vector2 min;
  Vector2 max;
};

using Obstacle = std::variant<Circle, Box>;

void validate_obstacle(const Obstacle& o);

struct CollisionParams {
  double epsilon = 0.03;  // buffer width, m
  double lambda_c = 10.0;
  double beta = 0.2;       // symmetric Beta(beta, beta) for intermediate times
  int n_intermediate = 8;
  double sweep_resolution = 0.005;  // m; 0 disables the swept check

  void validate() const;
};

/// Robot, obstacles and collision settings shared by every planner.
struct World {
  RobotModel robot;
  std::vector<Obstacle> obstacles;
  CollisionParams collision;
};

/// Distance to the nearest obstacle boundary, negative inside. +infinity for
/// an empty obstacle list.
double signed_distance(std::span<const Obstacle> obstacles, const Vector2& p);

/// Buffered quadratic cost of a clearance d.
double collision_cost(double d, double epsilon);

/// Sum of collision_cost over all balls at a single configuration.
double waypoint_collision_field(const World& world, const Configuration& q);

/// Both endpoints collision-free and within limits, and n_intermediate
/// interpolated configurations at Beta(beta, beta) times collision-free.
bool segment_safe(const World& world, const Configuration& qa, const Configuration& qb, Rng& rng);

/// Upper bound on how far any collision-check ball moves when the joints
/// move by dq.
double sweep_bound(const RobotModel& model, const Vector& dq);

/// Smallest ball clearance (distance to the nearest obstacle minus radius).
double min_clearance(const World& world, const Configuration& q);

/// Configurations spaced so that no ball moves more than 2h between them,
/// with h = sweep_resolution, each clear by more than epsilon + h. Every
/// configuration on the segment then has a zero collision field.
bool segment_swept_clear(const World& world, const Configuration& qa, const Configuration& qb);

/// segment_safe followed by segment_swept_clear: the local planner of all
/// planners in this library.
bool segment_certified(const World& world, const Configuration& qa, const Configuration& qb, Rng& rng);

}  // namespace bnmco
