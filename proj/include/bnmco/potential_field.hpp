#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "bnmco/environment.hpp"
#include "bnmco/kinematics.hpp"
#include "bnmco/types.hpp"

namespace bnmco {

/// Task-space box. Coordinates with x_min == x_max are equality constraints.
struct GoalConstraint {
  Vector x_min;
  Vector x_max;
  Vector lambda;
  std::vector<bool> angular;  // per coordinate; angular ones use wrapped differences

  void validate() const;
};

struct StartConstraint {
  Configuration theta0;
  Matrix metric;  // symmetric positive semidefinite

  void validate() const;
};

enum class FieldDirection { Forward, Backward };

/// Annealing schedule rho(i) = rho0 * (i + 1)^eta_rho. `iteration` counts
/// completed expansion iterations.
struct Annealer {
  double rho0 = 5.0;
  double eta_rho = 0.5;
  int iteration = 0;

  double rho() const { return rho0 * std::pow(static_cast<double>(iteration) + 1.0, eta_rho); }
};

/// Individual terms of a field evaluation.
struct FieldTerms {
  double penalty = 0.0;
  double collision = 0.0;
  double limits = 0.0;
};

double goal_penalty(const GoalConstraint& gc, const TaskState& x);
double start_penalty(const StartConstraint& sc, const Configuration& q);

/// Forward field (goal attraction) or backward field (start attraction),
/// each adding lambda_c times the collision field and the joint-limit barrier.
class PotentialField {
 public:
  static PotentialField forward(std::shared_ptr<const World> world, GoalConstraint goal, double tol);
  static PotentialField backward(std::shared_ptr<const World> world, StartConstraint start, double tol);

  FieldDirection direction() const { return direction_; }
  const World& world() const { return *world_; }
  const std::shared_ptr<const World>& world_ptr() const { return world_; }
  const GoalConstraint& goal() const { return *goal_; }
  const StartConstraint& start() const { return *start_; }
  double tolerance() const { return tol_; }
  int dim() const { return world_->robot.dof(); }

  double penalty(const Configuration& q) const;
  FieldTerms terms(const Configuration& q) const;
  double value(const FieldTerms& t) const;
  bool satisfied(const FieldTerms& t) const;

 private:
  PotentialField() = default;

  FieldDirection direction_ = FieldDirection::Forward;
  std::shared_ptr<const World> world_;
  std::optional<GoalConstraint> goal_;
  std::optional<StartConstraint> start_;
  double tol_ = 1e-3;
};

double field_value(const PotentialField& pf, const Configuration& q);

/// exp(-rho * F(q)); 0 for infeasible q.
double unnormalized_density(const PotentialField& pf, const Annealer& annealer, const Configuration& q);

double density_from_value(double value, double rho);

bool is_satisfied(const PotentialField& pf, const Configuration& q);

}  // namespace bnmco
