#include "bnmco/environment.hpp"

#include <algorithm>
#include <cmath>

namespace bnmco {

namespace {

struct DistanceTo {
  const Vector2& p;
  double operator()(const Circle& c) const { return (p - c.center).norm() - c.radius; }
  double operator()(const Box& b) const {
    const Vector2 center = 0.5 * (b.min + b.max);
    const Vector2 half = 0.5 * (b.max - b.min);
    const Vector2 q = (p - center).cwiseAbs() - half;
    const double outside = q.cwiseMax(0.0).norm();
    const double inside = std::min(q.maxCoeff(), 0.0);
    return outside + inside;
  }
};

}  // namespace

void validate_obstacle(const Obstacle& o) {
  if (const auto* c = std::get_if<Circle>(&o)) {
    if (!(c->radius > 0)) throw std::invalid_argument("obstacle: circle radius must be > 0");
  } else {
    const auto& b = std::get<Box>(o);
    if (!((b.min.array() < b.max.array()).all())) {
      throw std::invalid_argument("obstacle: box min must be < max elementwise");
    }
  }
}

void CollisionParams::validate() const {
  if (!(epsilon > 0) || !(lambda_c > 0) || !(beta > 0) || n_intermediate < 0) {
    throw std::invalid_argument("collision: epsilon, lambda_c, beta must be > 0 and n_intermediate >= 0");
  }
  if (!(sweep_resolution >= 0)) throw std::invalid_argument("collision: sweep_resolution must be >= 0");
}

double signed_distance(std::span<const Obstacle> obstacles, const Vector2& p) {
  double d = kInfiniteCost;
  for (const auto& o : obstacles) d = std::min(d, std::visit(DistanceTo{p}, o));
  return d;
}

double collision_cost(double d, double epsilon) {
  if (d > epsilon) return 0.0;
  if (d >= 0.0) {
    const double g = d - epsilon;
    return g * g / (2.0 * epsilon);
  }
  return kInfiniteCost;
}

double waypoint_collision_field(const World& world, const Configuration& q) {
  double total = 0.0;
  for (const auto& ball : ccb_positions(world.robot, q)) {
    const double d = signed_distance(world.obstacles, ball.center) - ball.radius;
    total += collision_cost(d, world.collision.epsilon);
    if (is_infinite_cost(total)) return kInfiniteCost;
  }
  return total;
}

bool segment_safe(const World& world, const Configuration& qa, const Configuration& qb, Rng& rng) {
  require_dim(qb.size(), qa.size(), "segment_safe");
  for (const auto* q : {&qa, &qb}) {
    if (joint_limit_cost(world.robot, *q) != 0.0) return false;
    if (waypoint_collision_field(world, *q) != 0.0) return false;
  }
  const double beta = world.collision.beta;
  for (int i = 0; i < world.collision.n_intermediate; ++i) {
    const double tau = rng.beta(beta, beta);
    const Configuration q = (1.0 - tau) * qa + tau * qb;
    if (waypoint_collision_field(world, q) != 0.0) return false;
  }
  return true;
}

double sweep_bound(const RobotModel& model, const Vector& dq) {
  require_dim(dq.size(), model.dof(), "sweep_bound");
  if (model.kind == RobotKind::Point) return dq.norm();
  double worst = 0.0;
  for (const auto& b : model.balls) {
    double reach = b.fraction * model.link_lengths[b.link];
    double moved = 0.0;
    for (int i = b.link; i >= 0; --i) {
      moved += reach * std::abs(dq[i]);
      if (i > 0) reach += model.link_lengths[i - 1];
    }
    worst = std::max(worst, moved);
  }
  return worst;
}

double min_clearance(const World& world, const Configuration& q) {
  double c = kInfiniteCost;
  for (const auto& ball : ccb_positions(world.robot, q)) {
    c = std::min(c, signed_distance(world.obstacles, ball.center) - ball.radius);
  }
  return c;
}

bool segment_swept_clear(const World& world, const Configuration& qa, const Configuration& qb) {
  require_dim(qb.size(), qa.size(), "segment_swept_clear");
  const double h = world.collision.sweep_resolution;
  if (h <= 0.0 || world.obstacles.empty()) return true;
  const Vector dq = qb - qa;
  const int n = std::max(1, static_cast<int>(std::ceil(sweep_bound(world.robot, dq) / (2.0 * h))));
  const double need = world.collision.epsilon + h;
  for (int k = 0; k <= n; ++k) {
    const Configuration q = qa + (static_cast<double>(k) / n) * dq;
    if (!(min_clearance(world, q) > need)) return false;
  }
  return true;
}

bool segment_certified(const World& world, const Configuration& qa, const Configuration& qb, Rng& rng) {
  return segment_safe(world, qa, qb, rng) && segment_swept_clear(world, qa, qb);
}

}  // namespace bnmco
