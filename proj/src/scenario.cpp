#include "bnmco/scenario.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace bnmco {

Matrix BaselineConfig::kinetic(int dof) const {
  if (kinetic_A.size() == 0) return kinetic_scale * Matrix::Identity(dof, dof);
  return kinetic_A;
}

void BaselineConfig::validate(int dof) const {
  if (!(step_size > 0)) throw std::invalid_argument("baseline: step_size must be > 0");
  if (max_iterations < 1 || prm_samples < 0 || prm_k < 1 || descent_steps < 1 || waypoints < 2 ||
      goal_attempts < 1 || goal_samples < 1) {
    throw std::invalid_argument("baseline: iteration and sample counts out of range");
  }
  if (!(fd_epsilon > 0) || !(descent_rate > 0)) throw std::invalid_argument("baseline: fd_epsilon and descent_rate must be > 0");
  const Matrix a = kinetic(dof);
  if (a.rows() != dof || a.cols() != dof) throw std::invalid_argument("baseline: kinetic_A must be D x D");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw std::invalid_argument("baseline: kinetic_A must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0)) throw std::invalid_argument("baseline: kinetic_A must be positive definite");
}

void PlannerConfig::validate(int dof) const {
  collision.validate();
  expansion.validate();
  baseline.validate(dof);
  if (!(tolerance >= 0)) throw std::invalid_argument("config: tolerance must be >= 0");
  if (safe_point_cap < 1) throw std::invalid_argument("config: safe_point_cap must be >= 1");
}

namespace {

struct Param {
  std::function<double(const PlannerConfig&)> get;
  std::function<void(PlannerConfig&, double)> set;
  bool integral = false;
};

const std::map<std::string, Param>& params() {
  auto real = [](auto getter) {
    return Param{[getter](const PlannerConfig& c) { return static_cast<double>(getter(const_cast<PlannerConfig&>(c))); },
                 [getter](PlannerConfig& c, double v) { getter(c) = v; }, false};
  };
  auto whole = [](auto getter) {
    return Param{[getter](const PlannerConfig& c) { return static_cast<double>(getter(const_cast<PlannerConfig&>(c))); },
                 [getter](PlannerConfig& c, double v) { getter(c) = static_cast<int>(v); }, true};
  };
  static const std::map<std::string, Param> table = {
      {"epsilon", real([](PlannerConfig& c) -> double& { return c.collision.epsilon; })},
      {"lambda_c", real([](PlannerConfig& c) -> double& { return c.collision.lambda_c; })},
      {"beta", real([](PlannerConfig& c) -> double& { return c.collision.beta; })},
      {"n_intermediate", whole([](PlannerConfig& c) -> int& { return c.collision.n_intermediate; })},
      {"sweep_resolution", real([](PlannerConfig& c) -> double& { return c.collision.sweep_resolution; })},
      {"tolerance", real([](PlannerConfig& c) -> double& { return c.tolerance; })},
      {"N", whole([](PlannerConfig& c) -> int& { return c.expansion.samples; })},
      {"N_mco", whole([](PlannerConfig& c) -> int& { return c.expansion.max_iterations; })},
      {"k", whole([](PlannerConfig& c) -> int& { return c.expansion.neighbors; })},
      {"etol", real([](PlannerConfig& c) -> double& { return c.expansion.etol; })},
      {"eta_pi", real([](PlannerConfig& c) -> double& { return c.expansion.factors.eta_pi; })},
      {"eta_mu", real([](PlannerConfig& c) -> double& { return c.expansion.factors.eta_mu; })},
      {"eta_sigma", real([](PlannerConfig& c) -> double& { return c.expansion.factors.eta_sigma; })},
      {"rho0", real([](PlannerConfig& c) -> double& { return c.expansion.rho0; })},
      {"eta_rho", real([](PlannerConfig& c) -> double& { return c.expansion.eta_rho; })},
      {"sigma_floor", real([](PlannerConfig& c) -> double& { return c.expansion.sigma_floor; })},
      {"gamma_floor", real([](PlannerConfig& c) -> double& { return c.expansion.gamma_floor; })},
      {"safe_point_cap", whole([](PlannerConfig& c) -> int& { return c.safe_point_cap; })},
      {"step_size", real([](PlannerConfig& c) -> double& { return c.baseline.step_size; })},
      {"max_iterations", whole([](PlannerConfig& c) -> int& { return c.baseline.max_iterations; })},
      {"prm_samples", whole([](PlannerConfig& c) -> int& { return c.baseline.prm_samples; })},
      {"prm_k", whole([](PlannerConfig& c) -> int& { return c.baseline.prm_k; })},
      {"kinetic_a", real([](PlannerConfig& c) -> double& { return c.baseline.kinetic_scale; })},
      {"descent_steps", whole([](PlannerConfig& c) -> int& { return c.baseline.descent_steps; })},
      {"fd_epsilon", real([](PlannerConfig& c) -> double& { return c.baseline.fd_epsilon; })},
      {"descent_rate", real([](PlannerConfig& c) -> double& { return c.baseline.descent_rate; })},
      {"waypoints", whole([](PlannerConfig& c) -> int& { return c.baseline.waypoints; })},
      {"goal_attempts", whole([](PlannerConfig& c) -> int& { return c.baseline.goal_attempts; })},
      {"goal_samples", whole([](PlannerConfig& c) -> int& { return c.baseline.goal_samples; })},
  };
  return table;
}

}  // namespace

void set_parameter(PlannerConfig& cfg, const std::string& key, double value) {
  if (key == "retry") {
    cfg.retry = value != 0.0;
    return;
  }
  const auto& t = params();
  const auto it = t.find(key);
  if (it == t.end()) throw std::invalid_argument("unknown parameter '" + key + "'");
  if (!std::isfinite(value)) throw std::invalid_argument("parameter " + key + " must be finite");
  if (it->second.integral && value != std::floor(value)) {
    throw std::invalid_argument("parameter " + key + " must be an integer");
  }
  it->second.set(cfg, value);
}

double get_parameter(const PlannerConfig& cfg, const std::string& key) {
  if (key == "retry") return cfg.retry ? 1.0 : 0.0;
  const auto& t = params();
  const auto it = t.find(key);
  if (it == t.end()) throw std::invalid_argument("unknown parameter '" + key + "'");
  return it->second.get(cfg);
}

std::vector<std::string> parameter_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : params()) keys.push_back(k);
  keys.push_back("retry");
  return keys;
}

Vector default_goal_lambda(const RobotModel& robot) {
  Vector l(robot.task_dim());
  for (int k = 0; k < robot.task_dim(); ++k) l[k] = robot.is_angular(k) ? 1.0 : 10.0;
  return l;
}

void Scenario::validate() const {
  robot.validate();
  for (const auto& o : obstacles) validate_obstacle(o);
  config.validate(robot.dof());
  start.validate();
  require_dim(start.theta0.size(), robot.dof(), "start theta0");
  goal.validate();
  require_dim(goal.x_min.size(), robot.task_dim(), "goal box");
  if (joint_limit_cost(robot, start.theta0) != 0.0) throw std::invalid_argument("start configuration violates joint limits");
  const World w{robot, obstacles, config.collision};
  if (is_infinite_cost(waypoint_collision_field(w, start.theta0))) {
    throw std::invalid_argument("start configuration is in collision");
  }
}

std::shared_ptr<const World> Scenario::world() const {
  return std::make_shared<const World>(World{robot, obstacles, config.collision});
}

PotentialField Scenario::forward_field(std::shared_ptr<const World> w) const {
  return PotentialField::forward(std::move(w), goal, config.tolerance);
}

PotentialField Scenario::backward_field(std::shared_ptr<const World> w) const {
  return PotentialField::backward(std::move(w), start, config.tolerance);
}

}  // namespace bnmco
