#include "bnmco/render.hpp"

#include <algorithm>
#include <sstream>

namespace bnmco {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Canvas {
  double x0, y0, x1, y1;

  void include(const Vector2& p, double pad = 0.0) {
    x0 = std::min(x0, p.x() - pad);
    y0 = std::min(y0, p.y() - pad);
    x1 = std::max(x1, p.x() + pad);
    y1 = std::max(y1, p.y() + pad);
  }
};

Vector2 tip(const RobotModel& robot, const Configuration& q) {
  const auto p = joint_positions(robot, q);
  return p.col(p.cols() - 1);
}

void draw_robot(std::ostream& os, const RobotModel& robot, const Configuration& q, const char* color) {
  const auto joints = joint_positions(robot, q);
  if (robot.kind == RobotKind::PlanarArm) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"0.015\" points=\"";
    for (Eigen::Index j = 0; j < joints.cols(); ++j) os << (j ? " " : "") << joints(0, j) << ',' << joints(1, j);
    os << "\"/>\n";
  }
  for (const auto& b : ccb_positions(robot, q)) {
    os << "<circle cx=\"" << b.center.x() << "\" cy=\"" << b.center.y() << "\" r=\"" << b.radius
       << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"0.004\"/>\n";
  }
}

}  // namespace

std::string render_svg(const Scenario& sc, const Trajectory* traj, const std::vector<BayesNet>& nets) {
  const RobotModel& robot = sc.robot;
  Canvas cv{1e300, 1e300, -1e300, -1e300};
  if (robot.kind == RobotKind::Point) {
    cv.include(robot.joint_min.head<2>());
    cv.include(robot.joint_max.head<2>());
  } else {
    cv.include(robot.base, robot.link_lengths.sum() + 0.1);
  }
  for (const auto& o : sc.obstacles) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      cv.include(c->center, c->radius);
    } else {
      cv.include(std::get<Box>(o).min);
      cv.include(std::get<Box>(o).max);
    }
  }
  const double pad = 0.05 * std::max(cv.x1 - cv.x0, cv.y1 - cv.y0);
  cv.x0 -= pad;
  cv.y0 -= pad;
  cv.x1 += pad;
  cv.y1 += pad;
  const double w = cv.x1 - cv.x0, h = cv.y1 - cv.y0;
  const double px = 800.0;

  std::ostringstream os;
  os.precision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px << "\" height=\"" << px * h / w << "\" viewBox=\""
     << cv.x0 << ' ' << -cv.y1 << ' ' << w << ' ' << h << "\">\n";
  os << "<title>" << escape(sc.name) << "</title>\n";
  os << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"4\" markerHeight=\"4\" "
        "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#666\"/></marker></defs>\n";
  os << "<rect x=\"" << cv.x0 << "\" y=\"" << -cv.y1 << "\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"white\"/>\n";
  os << "<g transform=\"scale(1,-1)\">\n";

  for (const auto& o : sc.obstacles) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      os << "<circle cx=\"" << c->center.x() << "\" cy=\"" << c->center.y() << "\" r=\"" << c->radius
         << "\" fill=\"#888888\"/>\n";
    } else {
      const auto& b = std::get<Box>(o);
      os << "<rect x=\"" << b.min.x() << "\" y=\"" << b.min.y() << "\" width=\"" << b.max.x() - b.min.x()
         << "\" height=\"" << b.max.y() - b.min.y() << "\" fill=\"#888888\"/>\n";
    }
  }
  os << "<rect x=\"" << sc.goal.x_min[0] << "\" y=\"" << sc.goal.x_min[1] << "\" width=\""
     << std::max(sc.goal.x_max[0] - sc.goal.x_min[0], 0.004) << "\" height=\""
     << std::max(sc.goal.x_max[1] - sc.goal.x_min[1], 0.004)
     << "\" fill=\"none\" stroke=\"green\" stroke-width=\"0.004\" stroke-dasharray=\"0.01,0.01\"/>\n";

  const char* net_colors[] = {"#8e44ad", "#e67e22"};
  for (size_t k = 0; k < nets.size(); ++k) {
    const BayesNet& net = nets[k];
    const char* color = net_colors[(net.direction == FieldDirection::Forward ? 1 : 0)];
    auto where = [&](const NetNode& n) -> Vector2 {
      if (n.component.mu.size() != robot.dof()) throw std::invalid_argument("net dimension does not match the robot");
      return tip(robot, n.component.mu);
    };
    for (const auto& e : net.edges) {
      if (e.from < 0 || e.to < 0 || e.from >= static_cast<int>(net.nodes.size()) ||
          e.to >= static_cast<int>(net.nodes.size())) {
        throw std::invalid_argument("net edge references a missing node");
      }
      const Vector2 a = where(net.nodes[e.from]), b = where(net.nodes[e.to]);
      os << "<line x1=\"" << a.x() << "\" y1=\"" << a.y() << "\" x2=\"" << b.x() << "\" y2=\"" << b.y()
         << "\" stroke=\"#666\" stroke-width=\"0.002\" marker-end=\"url(#arrow)\"/>\n";
    }
    for (const auto& n : net.nodes) {
      const Vector2 c = where(n);
      os << "<circle cx=\"" << c.x() << "\" cy=\"" << c.y() << "\" r=\"" << 0.004 + 0.03 * std::sqrt(n.importance)
         << "\" fill=\"" << color << "\" fill-opacity=\"0.5\"/>\n";
    }
  }

  draw_robot(os, robot, sc.start.theta0, "blue");
  if (traj && traj->size() > 0) {
    if (traj->waypoints.rows() != robot.dof()) throw std::invalid_argument("trajectory dimension does not match the robot");
    draw_robot(os, robot, traj->waypoints.col(traj->size() - 1), "green");
    os << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"0.006\" points=\"";
    for (int t = 0; t < traj->size(); ++t) {
      const Vector2 p = tip(robot, traj->waypoints.col(t));
      os << (t ? " " : "") << p.x() << ',' << p.y();
    }
    os << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace bnmco
