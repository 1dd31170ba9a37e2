#include <sstream>

#include "support.hpp"

using namespace bnmco;

namespace {

SeedSet uniform_seeds(int n, Rng& rng) {
  SeedSet s;
  s.points.resize(2, n);
  for (int i = 0; i < n; ++i) {
    s.points(0, i) = rng.uniform();
    s.points(1, i) = rng.uniform();
    s.ids.push_back(i);
  }
  return s;
}

Responsibilities<double> resp_of(const MatrixX<double>& g) {
  Responsibilities<double> r;
  r.gamma = g;
  r.source.assign(static_cast<size_t>(g.rows()), 0);
  return r;
}

std::string dump(const BayesNet& net) {
  std::ostringstream os;
  write_net(os, net);
  return os.str();
}

BayesNet free_space_net(std::uint64_t seed, ExpansionConfig cfg = {}) {
  const Scenario sc = test::point_scenario(Vector2(0.5, 0.5), Vector2(0.8, 0.8), Vector2(0.9, 0.9));
  const auto w = sc.world();
  Rng rng(seed);
  const SeedSet seeds = uniform_seeds(cfg.samples, rng);
  return exp_bayes_net(sc.backward_field(w), seeds, cfg, rng);
}

}  // namespace

TEST(StretchEdge, Examples) {
  MatrixX<double> g(4, 2);
  g << 0.25, 0.0, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0;
  auto e = stretch_edge(resp_of(g), {0, 1, 2, 3}, 0, 1600);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->length, 0.0);
  EXPECT_EQ(e->importance, 1.0);
  EXPECT_EQ(e->samples, 1600);

  e = stretch_edge(resp_of(g), {1}, 0, 1600);
  EXPECT_NEAR(e->length, std::log(4.0), 1e-15);
  EXPECT_NEAR(e->importance, 0.25, 1e-15);
  EXPECT_EQ(e->samples, 400);

  EXPECT_FALSE(stretch_edge(resp_of(g), {0, 1}, 1, 1600));
}

TEST(StretchEdge, LengthNonnegativeAndBudgetMonotone) {
  Rng rng(61);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(10));
    MatrixX<double> g(n, 1);
    for (int i = 0; i < n; ++i) g(i, 0) = rng.uniform() / n;
    std::vector<int> small{0}, all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto a = stretch_edge(resp_of(g), small, 0, 1000), b = stretch_edge(resp_of(g), all, 0, 1000);
    EXPECT_GE(a->length, 0.0);
    EXPECT_GE(a->length, b->length);
    EXPECT_LE(a->samples, b->samples);
  }
}

TEST(BayesNet, FreeSpaceTerminatesInFirstLayer) {
  const BayesNet net = free_space_net(3);
  EXPECT_TRUE(net.terminated);
  EXPECT_EQ(net.iterations, 1);
  ASSERT_GE(net.origin, 0);
  EXPECT_EQ(net.nodes[net.origin].layer, 1);
  EXPECT_FALSE(net.nodes[net.origin].satisfying.empty());
}

TEST(BayesNet, StopsUnterminatedWhenIterationsRunOut) {
  const Scenario sc = test::point_scenario(Vector2(0.5, 0.5), Vector2(0.8, 0.8), Vector2(0.9, 0.9));
  const auto w = sc.world();
  StartConstraint start = sc.start;
  const auto pf = PotentialField::backward(w, start, 1e-14);
  ExpansionConfig cfg;
  cfg.samples = 200;
  cfg.max_iterations = 2;
  Rng rng(4);
  const BayesNet net = exp_bayes_net(pf, uniform_seeds(200, rng), cfg, rng);
  EXPECT_FALSE(net.terminated);
  EXPECT_EQ(net.iterations, 2);
  EXPECT_EQ(net.origin, -1);
}

TEST(BayesNet, SingleComponentSingleClusterHasFullImportance) {
  const Scenario sc = test::point_scenario(Vector2(0.5, 0.5), Vector2(0.8, 0.8), Vector2(0.9, 0.9));
  const auto w = sc.world();
  ExpansionConfig cfg;
  cfg.samples = 300;
  cfg.neighbors = cfg.samples - 1;
  Mixture<double> mix{{{Vector2(0.3, 0.3), 0.01 * Matrix::Identity(2, 2)}}, Vector::Ones(1)};
  NetExpansion ex(sc.backward_field(w), mix, cfg, Rng(5));
  const IterationReport rep = ex.step();
  EXPECT_EQ(rep.clusters.size(), 1u);
  ASSERT_EQ(rep.children.size(), 1u);
  EXPECT_TRUE(rep.children[0].admitted);
  EXPECT_NEAR(rep.children[0].stretch.importance, 1.0, 1e-12);
  EXPECT_NEAR(rep.children[0].stretch.length, 0.0, 1e-12);
  EXPECT_EQ(rep.children[0].stretch.samples, 300);
}

TEST(BayesNet, IterationReportIsInternallyConsistent) {
  const Scenario sc = test::point_scenario(Vector2(0.1, 0.1), Vector2(0.8, 0.8), Vector2(0.9, 0.9),
                                           {Box{Vector2(0.45, 0.0), Vector2(0.55, 0.7)}});
  const auto w = sc.world();
  ExpansionConfig cfg;
  cfg.samples = 400;
  Rng rng(6);
  NetExpansion ex(sc.backward_field(w), uniform_seeds(400, rng), cfg, rng.split(1));
  while (!ex.done()) {
    const IterationReport rep = ex.step();
    EXPECT_EQ(std::accumulate(rep.counts.begin(), rep.counts.end(), 0), cfg.samples);
    EXPECT_NEAR(rep.pi_updated.sum(), 1.0, 1e-12);
    EXPECT_TRUE(test::near_rel(rep.pi_updated.sum(), 1.0, 1e-12));
    for (Eigen::Index j = 0; j < rep.renewed.resp.gamma.cols(); ++j) {
      if (rep.raw.gamma.col(j).sum() > 0)
        EXPECT_NEAR(rep.renewed.resp.gamma.col(j).sum(), rep.pi_updated[j], 1e-9);
    }
    if (rep.rebuilt_weights.size() > 0) EXPECT_NEAR(rep.rebuilt_weights.sum(), 1.0, 1e-12);
    if (!rep.terminated) EXPECT_NEAR(ex.mixture().weights.sum(), 1.0, 1e-12);
    EXPECT_LT(rep.rho, ex.annealer().rho() + (rep.terminated ? 1e-12 : 0.0));
  }
}

TEST(BayesNet, LayeredForestStructure) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const BayesNet net = free_space_net(seed);
    std::vector<int> parents(net.nodes.size(), 0);
    for (size_t i = 0; i < net.nodes.size(); ++i) EXPECT_EQ(net.nodes[i].id, static_cast<int>(i));
    for (const auto& e : net.edges) {
      EXPECT_EQ(net.nodes[e.to].layer, net.nodes[e.from].layer + 1);
      EXPECT_EQ(net.nodes[e.to].parent, e.from);
      EXPECT_LT(e.from, e.to);
      EXPECT_GE(e.length, 0.0);
      ++parents[e.to];
    }
    for (size_t i = 0; i < net.nodes.size(); ++i) EXPECT_EQ(parents[i], net.nodes[i].layer == 0 ? 0 : 1);
  }
}

TEST(BayesNet, ReproducibleForFixedSeed) {
  EXPECT_EQ(dump(free_space_net(9)), dump(free_space_net(9)));
  EXPECT_NE(dump(free_space_net(9)), dump(free_space_net(10)));
}

TEST(BayesNet, DumpRoundTripKeepsStructure) {
  // cached waypoints are summarized by their count and are not read back
  const BayesNet net = free_space_net(11);
  std::istringstream is(dump(net));
  const BayesNet back = read_net(is);
  EXPECT_EQ(back.direction, net.direction);
  EXPECT_EQ(back.terminated, net.terminated);
  EXPECT_EQ(back.origin, net.origin);
  EXPECT_EQ(back.iterations, net.iterations);
  ASSERT_EQ(back.nodes.size(), net.nodes.size());
  for (size_t i = 0; i < net.nodes.size(); ++i) {
    EXPECT_EQ(back.nodes[i].layer, net.nodes[i].layer);
    EXPECT_EQ(back.nodes[i].importance, net.nodes[i].importance);
    EXPECT_EQ(back.nodes[i].component.mu, net.nodes[i].component.mu);
    EXPECT_EQ(back.nodes[i].component.sigma, net.nodes[i].component.sigma);
  }
  ASSERT_EQ(back.edges.size(), net.edges.size());
  for (size_t i = 0; i < net.edges.size(); ++i) {
    EXPECT_EQ(back.edges[i].from, net.edges[i].from);
    EXPECT_EQ(back.edges[i].to, net.edges[i].to);
    EXPECT_EQ(back.edges[i].length, net.edges[i].length);
  }
}

TEST(BayesNet, ReadRejectsMalformedDump) {
  std::istringstream is("net forward 1 0 1\nnode 0 zero\n");
  EXPECT_THROW(read_net(is), Error);
}

TEST(BayesNet, GoalInsideObstacleFails) {
  const Scenario sc = test::point_scenario(Vector2(0.1, 0.1), Vector2(0.8, 0.8), Vector2(0.9, 0.9),
                                           {Box{Vector2(0.7, 0.7), Vector2(1.0, 1.0)}});
  const auto w = sc.world();
  ExpansionConfig cfg;
  cfg.samples = 400;
  cfg.rho0 = 1e4;
  Rng rng(12);
  try {
    exp_bayes_net(sc.forward_field(w), uniform_seeds(400, rng), cfg, rng);
    FAIL() << "expansion should fail";
  } catch (const ExpansionFailed& e) {
    EXPECT_FALSE(e.partial().terminated);
  }
}

TEST(ExpansionConfigValidate, Ranges) {
  ExpansionConfig c;
  EXPECT_NO_THROW(c.validate());
  c.samples = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.etol = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.neighbors = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
