#include "bnmco/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace bnmco {

using nlohmann::ordered_json;

namespace {

class Field {
 public:
  Field(const ordered_json& j, std::string path, const std::string& origin) : j_(j), path_(std::move(path)), origin_(origin) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(origin_ + ": field " + (path_.empty() ? "/" : path_) + ": " + msg);
  }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Field at(const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) Field(j_, path_ + "/" + key, origin_).fail("missing required field");
    return Field(j_.at(key), path_ + "/" + key, origin_);
  }

  Field at(size_t i) const { return Field(j_.at(i), path_ + "/" + std::to_string(i), origin_); }

  void only(std::initializer_list<const char*> keys) const {
    if (!j_.is_object()) fail("expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!allowed.count(k)) Field(v, path_ + "/" + k, origin_).fail("unknown field");
    }
  }

  size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0)) fail("must be > 0");
    return v;
  }

  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  Vector vector(Eigen::Index want = -1) const {
    const size_t n = size();
    if (want >= 0 && static_cast<Eigen::Index>(n) != want) {
      fail("expected " + std::to_string(want) + " numbers, got " + std::to_string(n));
    }
    Vector v(static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
  }

  Vector2 point() const { return vector(2); }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols) const {
    if (static_cast<Eigen::Index>(size()) != rows) fail("expected " + std::to_string(rows) + " rows");
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = at(static_cast<size_t>(r)).vector(cols).transpose();
    return m;
  }

  const ordered_json& json() const { return j_; }
  const std::string& path() const { return path_; }

 private:
  const ordered_json& j_;
  std::string path_;
  const std::string& origin_;
};

template <typename F>
void guarded(const Field& f, F&& body) {
  try {
    body();
  } catch (const InputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    f.fail(e.what());
  }
}

RobotModel read_robot(const Field& f) {
  const std::string type = f.at("type").str();
  RobotModel m;
  if (type == "point") {
    f.only({"type", "lower", "upper", "radius"});
    guarded(f, [&] { m = RobotModel::point(f.at("lower").point(), f.at("upper").point(), f.at("radius").positive()); });
  } else if (type == "arm") {
    f.only({"type", "links", "base", "lower", "upper", "ball_radius", "balls"});
    const Vector links = f.at("links").vector();
    const auto d = links.size();
    if (d == 0) f.at("links").fail("an arm needs at least one link");
    const Vector2 base = f.has("base") ? f.at("base").point() : Vector2::Zero();
    const double radius = f.has("ball_radius") ? f.at("ball_radius").positive() : 0.05;
    const Vector lo = f.at("lower").vector(d);
    const Vector hi = f.at("upper").vector(d);
    guarded(f, [&] { m = RobotModel::planar_arm(links, base, lo, hi, radius); });
    if (f.has("balls")) {
      const Field balls = f.at("balls");
      m.balls.clear();
      for (size_t i = 0; i < balls.size(); ++i) {
        const Field b = balls.at(i);
        b.only({"link", "fraction", "radius"});
        const double link = b.at("link").number();
        if (link != std::floor(link)) b.at("link").fail("expected an integer");
        m.balls.push_back({static_cast<int>(link), b.at("fraction").number(), b.at("radius").positive()});
      }
      guarded(balls, [&] { m.validate(); });
    }
  } else {
    f.at("type").fail("expected \"point\" or \"arm\"");
  }
  return m;
}

Obstacle read_obstacle(const Field& f) {
  const std::string type = f.at("type").str();
  Obstacle o;
  if (type == "circle") {
    f.only({"type", "center", "radius"});
    o = Circle{f.at("center").point(), f.at("radius").positive()};
  } else if (type == "box") {
    f.only({"type", "min", "max"});
    o = Box{f.at("min").point(), f.at("max").point()};
  } else {
    f.at("type").fail("expected \"circle\" or \"box\"");
  }
  guarded(f, [&] { validate_obstacle(o); });
  return o;
}

void read_params(const Field& f, PlannerConfig& cfg, int dof) {
  if (!f.json().is_object()) f.fail("expected an object");
  for (const auto& [key, value] : f.json().items()) {
    const Field v = f.at(key);
    if (key == "kinetic_A") {
      cfg.baseline.kinetic_A = v.matrix(dof, dof);
      continue;
    }
    if (value.is_boolean()) {
      guarded(v, [&] { set_parameter(cfg, key, value.get<bool>() ? 1.0 : 0.0); });
      continue;
    }
    const double x = v.number();
    guarded(v, [&] { set_parameter(cfg, key, x); });
  }
}

ordered_json vec_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json mat_json(const Matrix& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

std::string line_col(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::string what = e.what();
    const auto at = what.find("; ");
    if (at != std::string::npos) what = what.substr(at + 2);
    throw InputError(origin + ": " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + what);
  }
  const Field root(j, "", origin);
  root.only({"name", "note", "robot", "obstacles", "start", "goal", "params"});
  Scenario sc;
  sc.name = root.at("name").str();
  if (root.has("note")) sc.note = root.at("note").str();
  sc.robot = read_robot(root.at("robot"));
  const int d = sc.robot.dof();

  if (root.has("obstacles")) {
    const Field obs = root.at("obstacles");
    for (size_t i = 0; i < obs.size(); ++i) sc.obstacles.push_back(read_obstacle(obs.at(i)));
  }

  const Field start = root.at("start");
  start.only({"theta", "metric"});
  sc.start.theta0 = start.at("theta").vector(d);
  sc.start.metric = start.has("metric") ? start.at("metric").matrix(d, d) : Matrix::Identity(d, d);
  guarded(start, [&] { sc.start.validate(); });

  const Field goal = root.at("goal");
  goal.only({"min", "max", "lambda"});
  const int k = sc.robot.task_dim();
  sc.goal.x_min = goal.at("min").vector(k);
  sc.goal.x_max = goal.at("max").vector(k);
  sc.goal.lambda = goal.has("lambda") ? goal.at("lambda").vector(k) : default_goal_lambda(sc.robot);
  sc.goal.angular.resize(k);
  for (int i = 0; i < k; ++i) sc.goal.angular[i] = sc.robot.is_angular(i);
  guarded(goal, [&] { sc.goal.validate(); });

  if (root.has("params")) read_params(root.at("params"), sc.config, d);
  guarded(root.has("params") ? root.at("params") : root, [&] { sc.config.validate(d); });
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    root.at("start").at("theta").fail(e.what());
  }
  return sc;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_file(path), path.string()); }

ordered_json scenario_to_json(const Scenario& sc) {
  ordered_json j;
  j["name"] = sc.name;
  if (!sc.note.empty()) j["note"] = sc.note;
  ordered_json robot;
  if (sc.robot.kind == RobotKind::Point) {
    robot["type"] = "point";
    robot["lower"] = vec_json(sc.robot.joint_min);
    robot["upper"] = vec_json(sc.robot.joint_max);
    robot["radius"] = sc.robot.balls.front().radius;
  } else {
    robot["type"] = "arm";
    robot["links"] = vec_json(sc.robot.link_lengths);
    robot["base"] = vec_json(sc.robot.base);
    robot["lower"] = vec_json(sc.robot.joint_min);
    robot["upper"] = vec_json(sc.robot.joint_max);
    ordered_json balls = ordered_json::array();
    for (const auto& b : sc.robot.balls) balls.push_back({{"link", b.link}, {"fraction", b.fraction}, {"radius", b.radius}});
    robot["balls"] = balls;
  }
  j["robot"] = robot;
  ordered_json obs = ordered_json::array();
  for (const auto& o : sc.obstacles) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      obs.push_back({{"type", "circle"}, {"center", vec_json(c->center)}, {"radius", c->radius}});
    } else {
      const auto& b = std::get<Box>(o);
      obs.push_back({{"type", "box"}, {"min", vec_json(b.min)}, {"max", vec_json(b.max)}});
    }
  }
  j["obstacles"] = obs;
  j["start"] = {{"theta", vec_json(sc.start.theta0)}, {"metric", mat_json(sc.start.metric)}};
  j["goal"] = {{"min", vec_json(sc.goal.x_min)}, {"max", vec_json(sc.goal.x_max)}, {"lambda", vec_json(sc.goal.lambda)}};

  const PlannerConfig defaults;
  ordered_json params = ordered_json::object();
  for (const auto& key : parameter_keys()) {
    const double v = get_parameter(sc.config, key);
    if (v != get_parameter(defaults, key)) params[key] = v;
  }
  if (sc.config.baseline.kinetic_A.size() > 0) params["kinetic_A"] = mat_json(sc.config.baseline.kinetic_A);
  if (!params.empty()) j["params"] = params;
  return j;
}

std::string dump_scenario(const Scenario& sc) { return scenario_to_json(sc).dump(2) + "\n"; }

void apply_override(PlannerConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  double value;
  if (text == "true" || text == "false") {
    value = text == "true" ? 1.0 : 0.0;
  } else {
    size_t used = 0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw InputError("override '" + assignment + "': value is not a number");
  }
  try {
    set_parameter(cfg, key, value);
  } catch (const std::invalid_argument& e) {
    throw InputError("override '" + assignment + "': " + e.what());
  }
}

void write_trajectory(std::ostream& os, const Trajectory& traj) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (int t = 0; t < traj.size(); ++t) {
    line.str("");
    for (Eigen::Index k = 0; k < traj.waypoints.rows(); ++k) {
      if (k) line << ' ';
      line << traj.waypoints(k, t);
    }
    os << line.str() << '\n';
  }
}

Trajectory read_trajectory(std::istream& is, int dof, const std::string& origin) {
  std::vector<Vector> rows;
  std::string text;
  int lineno = 0;
  while (std::getline(is, text)) {
    ++lineno;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(text);
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) {
      size_t used = 0;
      double v = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || used == 0) {
        throw InputError(origin + ": line " + std::to_string(lineno) + ": '" + tok + "' is not a number");
      }
      vals.push_back(v);
    }
    if (static_cast<int>(vals.size()) != dof) {
      throw InputError(origin + ": line " + std::to_string(lineno) + ": expected " + std::to_string(dof) +
                       " values, got " + std::to_string(vals.size()));
    }
    rows.push_back(Eigen::Map<Vector>(vals.data(), dof));
  }
  if (rows.empty()) throw InputError(origin + ": no waypoints");
  Trajectory t;
  t.waypoints.resize(dof, static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) t.waypoints.col(static_cast<Eigen::Index>(i)) = rows[i];
  return t;
}

ordered_json diagnostics_to_json(const Diagnostics& d, bool include_timing) {
  ordered_json j;
  j["planner"] = d.planner;
  j["rng"] = d.rng_algorithm;
  j["seed"] = d.seed;
  j["success"] = d.success;
  j["failure_phase"] = d.failure_phase;
  j["message"] = d.message;
  j["attempts"] = d.attempts;
  if (include_timing) {
    ordered_json phases = ordered_json::object();
    for (const auto& [k, v] : d.phase_ms) {
      const double prev = phases.contains(k) ? phases[k].get<double>() : 0.0;
      phases[k] = prev + v;
    }
    j["phase_ms"] = phases;
  }
  ordered_json counters = ordered_json::object();
  for (const auto& [k, v] : d.counters) counters[k] = v;
  j["counters"] = counters;
  j["candidate_lengths"] = d.candidate_lengths;
  j["trajectory_waypoints"] = d.trajectory_waypoints;
  j["trajectory_length"] = d.trajectory_length;
  return j;
}

}  // namespace bnmco
