#include <filesystem>
#include <sstream>

#include "support.hpp"

using namespace bnmco;

namespace {

const char* kMinimal = R"({
  "name": "mini",
  "robot": {"type": "point", "lower": [0, 0], "upper": [1, 1], "radius": 0.02},
  "start": {"theta": [0.1, 0.1]},
  "goal": {"min": [0.8, 0.8], "max": [0.9, 0.9]}
})";

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "case.json");
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

::testing::AssertionResult mentions(const std::string& text, const std::string& part) {
  if (text.find(part) != std::string::npos) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "'" << text << "' does not mention '" << part << "'";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  if (at == std::string::npos) throw std::logic_error("pattern not found: " + from);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST(ParseScenario, MinimalDefaults) {
  const Scenario sc = parse_scenario(kMinimal);
  EXPECT_EQ(sc.name, "mini");
  EXPECT_EQ(sc.robot.dof(), 2);
  EXPECT_TRUE(sc.obstacles.empty());
  EXPECT_EQ(sc.start.metric, Matrix::Identity(2, 2));
  EXPECT_EQ(sc.config.tolerance, 1e-3);
  EXPECT_EQ(sc.config.expansion.samples, 1600);
  EXPECT_EQ(sc.config.collision.epsilon, 0.03);
}

TEST(ParseScenario, SyntaxErrorNamesLineAndColumn) {
  const std::string bad = replace(kMinimal, "\"start\": {", "\"start\": {,");
  const std::string what = error_of(bad);
  EXPECT_TRUE(mentions(what, "case.json"));
  EXPECT_TRUE(mentions(what, "line 4"));
}

TEST(ParseScenario, ContentErrorsNameTheField) {
  EXPECT_TRUE(mentions(error_of(replace(kMinimal, "\"radius\": 0.02", "\"radius\": -1")), "/robot/radius"));
  EXPECT_TRUE(mentions(error_of(replace(kMinimal, "[0.1, 0.1]}", "[0.1]}")), "/start/theta"));
  EXPECT_TRUE(mentions(error_of(replace(kMinimal, "\"name\": \"mini\",", "")), "/name"));
  EXPECT_TRUE(mentions(error_of(replace(kMinimal, "\"name\": \"mini\",", "\"name\": \"mini\", \"colour\": 1,")), "/colour"));
  EXPECT_TRUE(mentions(error_of(replace(kMinimal, "\"max\": [0.9, 0.9]", "\"max\": [0.7, 0.9]")), "/goal"));
  EXPECT_TRUE(mentions(error_of(replace(kMinimal, "\"max\": [0.9, 0.9]}", "\"max\": [0.9, 0.9]}, \"params\": {\"k\": 0}")), "k must be"));
  EXPECT_TRUE(mentions(error_of(replace(kMinimal, "\"max\": [0.9, 0.9]}", "\"max\": [0.9, 0.9]}, \"params\": {\"bogus\": 1}")), "/params/bogus"));
  EXPECT_TRUE(mentions(error_of(replace(kMinimal, "[0.1, 0.1]}", "[1.5, 0.1]}")), "/start/theta"));
}

TEST(ParseScenario, ObstaclesAndArm) {
  const Scenario sc = parse_scenario(R"({
    "name": "arm",
    "robot": {"type": "arm", "links": [0.5, 0.4], "base": [0, 0], "lower": [-3, -3], "upper": [3, 3],
              "ball_radius": 0.04},
    "obstacles": [{"type": "circle", "center": [0.5, 0.5], "radius": 0.1},
                  {"type": "box", "min": [-0.2, 0.3], "max": [0.0, 0.5]}],
    "start": {"theta": [0.0, 0.0]},
    "goal": {"min": [0.3, 0.3, -3.2], "max": [0.4, 0.4, 3.2]},
    "params": {"N": 400, "eta_rho": 1.0}
  })");
  EXPECT_EQ(sc.robot.dof(), 2);
  EXPECT_EQ(sc.robot.task_dim(), 3);
  ASSERT_EQ(sc.obstacles.size(), 2u);
  EXPECT_TRUE(std::holds_alternative<Circle>(sc.obstacles[0]));
  EXPECT_TRUE(std::holds_alternative<Box>(sc.obstacles[1]));
  EXPECT_EQ(sc.config.expansion.samples, 400);
  EXPECT_EQ(sc.config.expansion.eta_rho, 1.0);
  EXPECT_EQ(sc.goal.angular, (std::vector<bool>{false, false, true}));
}

TEST(ShippedScenarios, LoadAndRoundTrip) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(test::scenario_dir())) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const Scenario sc = load_scenario(entry.path());
    EXPECT_FALSE(sc.note.empty()) << entry.path();
    const std::string once = dump_scenario(sc);
    const Scenario back = parse_scenario(once, entry.path().string());
    EXPECT_EQ(dump_scenario(back), once) << entry.path();
    EXPECT_EQ(back.start.theta0, sc.start.theta0);
    EXPECT_EQ(back.config.tolerance, sc.config.tolerance);
    const auto w = sc.world();
    EXPECT_EQ(waypoint_collision_field(*w, sc.start.theta0), 0.0) << entry.path();
  }
  EXPECT_EQ(count, 12);
}

TEST(LoadScenario, MissingFile) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), InputError);
}

TEST(TrajectoryIo, RoundTripAtFullPrecision) {
  Rng rng(91);
  Matrix m(3, 7);
  for (int i = 0; i < 7; ++i)
    for (int k = 0; k < 3; ++k) m(k, i) = rng.normal() * 1e3;
  std::stringstream ss;
  write_trajectory(ss, Trajectory{m});
  EXPECT_EQ(read_trajectory(ss, 3).waypoints, m);
}

TEST(TrajectoryIo, RejectsBadLines) {
  std::istringstream wrong_count("0.1 0.2\n0.3\n");
  try {
    read_trajectory(wrong_count, 2, "t.txt");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_TRUE(mentions(e.what(), "t.txt: line 2"));
  }
  std::istringstream not_number("0.1 abc\n");
  EXPECT_THROW(read_trajectory(not_number, 2), InputError);
  std::istringstream empty("");
  EXPECT_THROW(read_trajectory(empty, 2), InputError);
}

TEST(Overrides, ApplyAndReject) {
  PlannerConfig cfg;
  apply_override(cfg, "N=400");
  apply_override(cfg, "eta_pi=1.0");
  apply_override(cfg, "beta=2");
  EXPECT_EQ(cfg.expansion.samples, 400);
  EXPECT_EQ(cfg.expansion.factors.eta_pi, 1.0);
  EXPECT_EQ(cfg.collision.beta, 2.0);
  EXPECT_THROW(apply_override(cfg, "N"), InputError);
  EXPECT_THROW(apply_override(cfg, "N=abc"), InputError);
  EXPECT_THROW(apply_override(cfg, "unknown=1"), InputError);
  EXPECT_THROW(apply_override(cfg, "N=1.5"), InputError);
}

TEST(Parameters, EveryKeyRoundTrips) {
  PlannerConfig cfg;
  for (const auto& key : parameter_keys()) {
    const double v = get_parameter(cfg, key);
    EXPECT_NO_THROW(set_parameter(cfg, key, v)) << key;
    EXPECT_EQ(get_parameter(cfg, key), v) << key;
  }
}

TEST(DiagnosticsJson, TimingIsOptional) {
  Diagnostics d;
  d.planner = "bnmco";
  d.phase_ms = {{"seed", 1.5}, {"seed", 2.0}};
  d.count("bridges", 3);
  const auto with = diagnostics_to_json(d);
  EXPECT_EQ(with["phase_ms"]["seed"].get<double>(), 3.5);
  EXPECT_EQ(with["counters"]["bridges"].get<double>(), 3.0);
  EXPECT_FALSE(diagnostics_to_json(d, false).contains("phase_ms"));
}
