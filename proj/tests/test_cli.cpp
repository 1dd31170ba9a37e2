#include <sys/wait.h>

#include <fstream>

#include "support.hpp"

namespace fs = std::filesystem;
using namespace bnmco;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(BNMCO_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("bnmco_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string scenario(const char* file) const { return (test::scenario_dir() / file).string(); }
  fs::path dir_;
};

size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

}  // namespace

TEST_F(CliTest, PlanWritesArtifacts) {
  const fs::path out = dir_ / "plan";
  EXPECT_EQ(run("plan --scenario " + scenario("01_point_wall.json") + " --seed 2 --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "trajectory.txt"));
  EXPECT_TRUE(fs::exists(out / "diagnostics.json"));
  EXPECT_TRUE(fs::exists(out / "net_forward.txt"));
  EXPECT_TRUE(fs::exists(out / "net_backward.txt"));
  const Scenario sc = load_scenario(scenario("01_point_wall.json"));
  std::ifstream in(out / "trajectory.txt");
  const Trajectory t = read_trajectory(in, 2);
  Rng vr(5);
  EXPECT_TRUE(verify_trajectory(sc, t, vr));

  const fs::path svg = dir_ / "scene.svg";
  EXPECT_EQ(run("render --scenario " + scenario("01_point_wall.json") + " --trajectory " + (out / "trajectory.txt").string() +
                " --net " + (out / "net_forward.txt").string() + " --out " + svg.string()),
            0);
  ASSERT_TRUE(fs::exists(svg));
  EXPECT_NE(read_file(svg).find("<svg"), std::string::npos);
}

TEST_F(CliTest, PlanningFailureExitsOne) {
  const fs::path out = dir_ / "fail";
  EXPECT_EQ(run("plan --scenario " + scenario("02_point_u_trap.json") + " --planner pf-descent --out " + out.string()), 1);
  EXPECT_TRUE(fs::exists(out / "diagnostics.json"));
  EXPECT_FALSE(fs::exists(out / "trajectory.txt"));
}

TEST_F(CliTest, InputErrorsExitTwo) {
  const fs::path out = dir_ / "x";
  EXPECT_EQ(run("plan --scenario /nonexistent.json --out " + out.string()), 2);
  EXPECT_EQ(run("plan --scenario " + scenario("01_point_wall.json") + " --set bogus=1 --out " + out.string()), 2);
  EXPECT_EQ(run("plan --scenario " + scenario("01_point_wall.json") + " --set k=0 --out " + out.string()), 2);
  EXPECT_EQ(run("plan --scenario " + scenario("01_point_wall.json") + " --planner astar --out " + out.string()), 2);
  EXPECT_EQ(run("plan --no-such-flag"), 2);
  EXPECT_EQ(run("plan"), 2);
  EXPECT_EQ(run("tune --dir " + test::scenario_dir().string() + " --grid nope=1 --out " + out.string()), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, BenchmarkAndTuneWriteSummaries) {
  const fs::path scen = dir_ / "scen";
  fs::create_directories(scen);
  fs::copy_file(scenario("01_point_wall.json"), scen / "01_point_wall.json");
  const fs::path out = dir_ / "bench";
  EXPECT_EQ(run("benchmark --dir " + scen.string() + " --planners bnmco,pf-descent --seeds 2 --set N=300 --out " +
                out.string()),
            0);
  EXPECT_EQ(line_count(out / "runs.jsonl"), 4u);
  EXPECT_TRUE(fs::exists(out / "summary.txt"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));

  const fs::path tout = dir_ / "tune";
  EXPECT_EQ(run("tune --dir " + scen.string() + " --grid 'eta_pi=0.4,1.0' --seeds 1 --set N=300 --out " + tout.string()),
            0);
  EXPECT_TRUE(fs::exists(tout / "tune.txt"));
  EXPECT_TRUE(fs::exists(tout / "tune.json"));
}
