#pragma once

#include <cmath>
#include <filesystem>
#include <memory>
#include <string>

#include <gtest/gtest.h>

#include "bnmco/harness.hpp"

namespace bnmco::test {

inline std::filesystem::path scenario_dir() { return BNMCO_SCENARIO_DIR; }

inline ::testing::AssertionResult near_rel(double got, double want, double rel = 1e-9) {
  const double scale = std::max(1.0, std::abs(want));
  if (std::abs(got - want) <= rel * scale) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "got " << got << ", want " << want << " (rel tol " << rel << ")";
}

inline Scenario point_scenario(const Vector2& start, const Vector2& goal_lo, const Vector2& goal_hi,
                               std::vector<Obstacle> obstacles = {}) {
  Scenario sc;
  sc.name = "test_point";
  sc.robot = RobotModel::point(Vector2(0, 0), Vector2(1, 1), 0.02);
  sc.obstacles = std::move(obstacles);
  sc.start.theta0 = start;
  sc.start.metric = Matrix::Identity(2, 2);
  sc.goal.x_min = goal_lo;
  sc.goal.x_max = goal_hi;
  sc.goal.lambda = default_goal_lambda(sc.robot);
  sc.goal.angular = {false, false};
  sc.validate();
  return sc;
}

inline std::shared_ptr<World> make_world(RobotModel robot, std::vector<Obstacle> obstacles = {},
                                         CollisionParams params = {}) {
  auto w = std::make_shared<World>();
  w->robot = std::move(robot);
  w->obstacles = std::move(obstacles);
  w->collision = params;
  return w;
}

inline Matrix random_spd(int d, Rng& rng, double scale = 1.0) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  return scale * (a * a.transpose() / d + 0.1 * Matrix::Identity(d, d));
}

}  // namespace bnmco::test
