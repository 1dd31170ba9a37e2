#include "bnmco/kinematics.hpp"

#include <cmath>
#include <string>

namespace bnmco {

void RobotModel::validate() const {
  if (joint_min.size() != joint_max.size() || joint_min.size() == 0) {
    throw std::invalid_argument("robot: joint_min and joint_max must be nonempty and equal length");
  }
  for (Eigen::Index i = 0; i < joint_min.size(); ++i) {
    if (!(joint_min[i] < joint_max[i])) {
      throw std::invalid_argument("robot: joint_min[" + std::to_string(i) + "] must be < joint_max");
    }
  }
  if (balls.empty()) throw std::invalid_argument("robot: at least one collision-check ball required");
  for (const auto& b : balls) {
    if (!(b.radius > 0)) throw std::invalid_argument("robot: ball radius must be > 0");
    if (!(b.fraction >= 0.0 && b.fraction <= 1.0)) {
      throw std::invalid_argument("robot: ball fraction must lie in [0, 1]");
    }
  }
  if (kind == RobotKind::Point) {
    if (dof() != 2) throw std::invalid_argument("robot: point robot must have 2 coordinates");
    if (balls.size() != 1) throw std::invalid_argument("robot: point robot carries exactly one ball");
  } else {
    if (link_lengths.size() != dof()) {
      throw std::invalid_argument("robot: arm needs one joint per link");
    }
    if ((link_lengths.array() <= 0).any()) {
      throw std::invalid_argument("robot: link lengths must be positive");
    }
    for (const auto& b : balls) {
      if (b.link < 0 || b.link >= dof()) throw std::invalid_argument("robot: ball link index out of range");
    }
  }
}

std::vector<CheckBall> RobotModel::default_layout(int links, double radius) {
  std::vector<CheckBall> out;
  for (int l = 0; l < links; ++l) {
    for (double f : {0.25, 0.5, 0.75, 1.0}) out.push_back({l, f, radius});
  }
  return out;
}

RobotModel RobotModel::point(const Vector2& lo, const Vector2& hi, double radius) {
  RobotModel m;
  m.kind = RobotKind::Point;
  m.joint_min = lo;
  m.joint_max = hi;
  m.balls = {{0, 1.0, radius}};
  m.validate();
  return m;
}

RobotModel RobotModel::planar_arm(const Vector& lengths, const Vector2& base, const Vector& lo,
                                  const Vector& hi, double ball_radius) {
  RobotModel m;
  m.kind = RobotKind::PlanarArm;
  m.link_lengths = lengths;
  m.base = base;
  m.joint_min = lo;
  m.joint_max = hi;
  m.balls = default_layout(static_cast<int>(lengths.size()), ball_radius);
  m.validate();
  return m;
}

Eigen::Matrix2Xd joint_positions(const RobotModel& model, const Configuration& q) {
  require_dim(q.size(), model.dof(), "joint_positions");
  if (model.kind == RobotKind::Point) return q.head<2>();
  const Eigen::Index n = model.link_lengths.size();
  Eigen::Matrix2Xd p(2, n + 1);
  p.col(0) = model.base;
  double angle = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    angle += q[j];
    p.col(j + 1) = p.col(j) + model.link_lengths[j] * Vector2(std::cos(angle), std::sin(angle));
  }
  return p;
}

TaskState forward_kinematics(const RobotModel& model, const Configuration& q) {
  require_dim(q.size(), model.dof(), "forward_kinematics");
  if (model.kind == RobotKind::Point) return q;
  const auto p = joint_positions(model, q);
  TaskState x(3);
  x.head<2>() = p.col(p.cols() - 1);
  x[2] = wrap_angle(q.sum());
  return x;
}

std::vector<PlacedBall> ccb_positions(const RobotModel& model, const Configuration& q) {
  require_dim(q.size(), model.dof(), "ccb_positions");
  std::vector<PlacedBall> out;
  out.reserve(model.balls.size());
  if (model.kind == RobotKind::Point) {
    for (const auto& b : model.balls) out.push_back({q.head<2>(), b.radius});
    return out;
  }
  const auto p = joint_positions(model, q);
  for (const auto& b : model.balls) {
    const Vector2 a = p.col(b.link);
    const Vector2 e = p.col(b.link + 1);
    out.push_back({a + b.fraction * (e - a), b.radius});
  }
  return out;
}

double joint_limit_cost(const RobotModel& model, const Configuration& q) {
  require_dim(q.size(), model.dof(), "joint_limit_cost");
  const bool inside = ((q - model.joint_min).array() >= 0).all() && ((model.joint_max - q).array() >= 0).all();
  return inside ? 0.0 : kInfiniteCost;
}

}  // namespace bnmco
