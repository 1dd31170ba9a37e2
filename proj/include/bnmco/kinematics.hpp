#pragma once

#include <vector>

#include "bnmco/types.hpp"

namespace bnmco {

enum class RobotKind { Point, PlanarArm };

/// Collision-check ball attached to a link. For the point robot the link
/// index and fraction are ignored and the ball sits on the point.
struct CheckBall {
  int link = 0;
  double fraction = 1.0;
  double radius = 0.05;
};

struct PlacedBall {
  Vector2 center;
  double radius;
};

/// End-effector state: (x, y, heading) for the arm, (x, y) for the point.
using TaskState = Eigen::VectorXd;

struct RobotModel {
  RobotKind kind = RobotKind::Point;
  Vector link_lengths;  // arm only, meters
  Vector2 base = Vector2::Zero();
  std::vector<CheckBall> balls;
  Vector joint_min;
  Vector joint_max;

  int dof() const { return static_cast<int>(joint_min.size()); }
  int task_dim() const { return kind == RobotKind::Point ? 2 : 3; }
  /// Whether task coordinate k is an angle (compared with wrapped differences).
  bool is_angular(int k) const { return kind == RobotKind::PlanarArm && k == 2; }

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  static RobotModel point(const Vector2& lo, const Vector2& hi, double radius);
  /// Planar serial arm with the default ball layout (fractions 0.25, 0.5,
  /// 0.75, 1.0 on every link) unless `balls` is given.
  static RobotModel planar_arm(const Vector& lengths, const Vector2& base, const Vector& lo,
                               const Vector& hi, double ball_radius = 0.05);
  static std::vector<CheckBall> default_layout(int links, double radius);
};

/// Positions of the arm joints: column 0 is the base, column j+1 the tip of
/// link j. For the point robot a single column holding q.
Eigen::Matrix2Xd joint_positions(const RobotModel& model, const Configuration& q);

TaskState forward_kinematics(const RobotModel& model, const Configuration& q);

std::vector<PlacedBall> ccb_positions(const RobotModel& model, const Configuration& q);

/// 0 inside [joint_min, joint_max] (inclusive), kInfiniteCost otherwise.
double joint_limit_cost(const RobotModel& model, const Configuration& q);

}  // namespace bnmco
