#include "bnmco/potential_field.hpp"

#include <algorithm>
#include <cmath>

namespace bnmco {

void GoalConstraint::validate() const {
  const auto k = x_min.size();
  if (k == 0 || x_max.size() != k || lambda.size() != k || static_cast<Eigen::Index>(angular.size()) != k) {
    throw std::invalid_argument("goal: x_min, x_max, lambda and angular must have equal nonzero length");
  }
  if ((x_min.array() > x_max.array()).any()) throw std::invalid_argument("goal: x_min must be <= x_max");
  if ((lambda.array() <= 0).any()) throw std::invalid_argument("goal: lambda must be > 0");
}

void StartConstraint::validate() const {
  const auto d = theta0.size();
  if (d == 0 || metric.rows() != d || metric.cols() != d) {
    throw std::invalid_argument("start: metric must be D x D with D = dim(theta0)");
  }
  if ((metric - metric.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("start: metric must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(metric, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw std::invalid_argument("start: metric must be positive semidefinite");
  }
}

double goal_penalty(const GoalConstraint& gc, const TaskState& x) {
  require_dim(x.size(), gc.x_min.size(), "goal_penalty");
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double violation;
    if (gc.angular[i]) {
      const double center = 0.5 * (gc.x_min[i] + gc.x_max[i]);
      const double half = 0.5 * (gc.x_max[i] - gc.x_min[i]);
      violation = std::max(std::abs(wrap_angle(x[i] - center)) - half, 0.0);
    } else {
      violation = std::max(gc.x_min[i] - x[i], 0.0) + std::max(x[i] - gc.x_max[i], 0.0);
    }
    total += gc.lambda[i] * violation * violation;
  }
  return total;
}

double start_penalty(const StartConstraint& sc, const Configuration& q) {
  require_dim(q.size(), sc.theta0.size(), "start_penalty");
  const Vector d = q - sc.theta0;
  return std::max(d.dot(sc.metric * d), 0.0);
}

PotentialField PotentialField::forward(std::shared_ptr<const World> world, GoalConstraint goal, double tol) {
  goal.validate();
  require_dim(goal.x_min.size(), world->robot.task_dim(), "goal constraint");
  PotentialField pf;
  pf.direction_ = FieldDirection::Forward;
  pf.world_ = std::move(world);
  pf.goal_ = std::move(goal);
  pf.tol_ = tol;
  return pf;
}

PotentialField PotentialField::backward(std::shared_ptr<const World> world, StartConstraint start, double tol) {
  start.validate();
  require_dim(start.theta0.size(), world->robot.dof(), "start constraint");
  PotentialField pf;
  pf.direction_ = FieldDirection::Backward;
  pf.world_ = std::move(world);
  pf.start_ = std::move(start);
  pf.tol_ = tol;
  return pf;
}

double PotentialField::penalty(const Configuration& q) const {
  if (direction_ == FieldDirection::Forward) return goal_penalty(*goal_, forward_kinematics(world_->robot, q));
  return start_penalty(*start_, q);
}

FieldTerms PotentialField::terms(const Configuration& q) const {
  FieldTerms t;
  t.limits = joint_limit_cost(world_->robot, q);
  t.penalty = penalty(q);
  t.collision = waypoint_collision_field(*world_, q);
  return t;
}

double PotentialField::value(const FieldTerms& t) const {
  if (is_infinite_cost(t.limits) || is_infinite_cost(t.collision)) return kInfiniteCost;
  return t.penalty + world_->collision.lambda_c * t.collision + t.limits;
}

bool PotentialField::satisfied(const FieldTerms& t) const {
  return t.penalty <= tol_ && t.collision == 0.0 && t.limits == 0.0;
}

double field_value(const PotentialField& pf, const Configuration& q) { return pf.value(pf.terms(q)); }

double density_from_value(double value, double rho) {
  if (is_infinite_cost(value)) return 0.0;
  return std::exp(-rho * value);
}

double unnormalized_density(const PotentialField& pf, const Annealer& annealer, const Configuration& q) {
  return density_from_value(field_value(pf, q), annealer.rho());
}

bool is_satisfied(const PotentialField& pf, const Configuration& q) { return pf.satisfied(pf.terms(q)); }

}  // namespace bnmco
