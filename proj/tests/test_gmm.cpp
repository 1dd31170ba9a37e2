#include <numbers>
#include <numeric>

#include "support.hpp"

using namespace bnmco;

namespace {

double gaussian_pdf(const Vector& x, const Vector& mu, const Matrix& sigma) {
  const int d = static_cast<int>(x.size());
  const Vector dev = x - mu;
  const double quad = dev.dot(sigma.inverse() * dev);
  return std::exp(-0.5 * quad) / std::sqrt(std::pow(2 * std::numbers::pi, d) * sigma.determinant());
}

Mixture<double> random_mixture(int m, int d, Rng& rng) {
  Mixture<double> mix;
  Vector w(m);
  for (int j = 0; j < m; ++j) {
    Vector mu(d);
    for (int i = 0; i < d; ++i) mu[i] = rng.uniform(-1, 1);
    mix.components.push_back({mu, test::random_spd(d, rng, 0.3)});
    w[j] = rng.uniform(0.05, 1.0);
  }
  mix.weights = w / w.sum();
  return mix;
}

MatrixX<double> gamma_oracle(const Mixture<double>& mix, const Matrix& x, const Vector& density) {
  const auto n = x.cols();
  MatrixX<double> g = MatrixX<double>::Zero(n, mix.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    double denom = 0;
    for (int j = 0; j < mix.size(); ++j)
      denom += mix.weights[j] * gaussian_pdf(x.col(i), mix.components[j].mu, mix.components[j].sigma);
    for (int j = 0; j < mix.size(); ++j)
      g(i, j) = density[i] * gaussian_pdf(x.col(i), mix.components[j].mu, mix.components[j].sigma) / denom;
  }
  return g;
}

Responsibilities<double> as_resp(const MatrixX<double>& g) {
  Responsibilities<double> r;
  r.gamma = g;
  r.source.assign(static_cast<size_t>(g.rows()), 0);
  return r;
}

}  // namespace

TEST(SampleMixture, ZeroCountsGiveEmptySet) {
  Rng rng(1);
  Mixture<double> mix{{{Vector::Zero(2), Matrix::Identity(2, 2)}}, Vector::Ones(1)};
  EXPECT_EQ(sample_mixture(mix, {0}, rng).size(), 0);
}

TEST(SampleMixture, MeanWithinClt) {
  Mixture<double> mix{{{Vector::Zero(3), Matrix::Identity(3, 3)}}, Vector::Ones(1)};
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    const auto s = sample_mixture(mix, {100}, rng);
    ASSERT_EQ(s.size(), 100);
    const Vector mean = s.points.rowwise().mean();
    for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(mean[i]), 4.0 / std::sqrt(100.0));
  }
}

TEST(SampleMixture, DeterministicAndRecordsSource) {
  Rng ra(4), rb(4), rm(9);
  const auto mix = random_mixture(3, 2, rm);
  const auto a = sample_mixture(mix, {2, 0, 3}, ra);
  const auto b = sample_mixture(mix, {2, 0, 3}, rb);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.source, (std::vector<int>{0, 0, 2, 2, 2}));
}

TEST(Responsibilities, SingleComponentEqualsDensity) {
  Rng rng(2);
  Mixture<double> mix{{{Vector2(0.2, -0.1), 0.5 * Matrix::Identity(2, 2)}}, Vector::Ones(1)};
  const auto s = sample_mixture(mix, {50}, rng);
  Vector p(50);
  for (int i = 0; i < 50; ++i) p[i] = rng.uniform();
  const auto r = responsibilities<double>(mix, s, p);
  for (int i = 0; i < 50; ++i) EXPECT_TRUE(test::near_rel(r.gamma(i, 0), p[i]));
}

TEST(Responsibilities, ZeroDensityGivesZeroRow) {
  Rng rng(3);
  const auto mix = random_mixture(2, 2, rng);
  const auto s = sample_mixture(mix, {3, 3}, rng);
  Vector p = Vector::Ones(6);
  p[4] = 0.0;
  const auto r = responsibilities<double>(mix, s, p);
  EXPECT_EQ(r.gamma.row(4).sum(), 0.0);
  EXPECT_GT(r.gamma.row(3).sum(), 0.0);
}

TEST(Responsibilities, SymmetricPairEqualEntries) {
  Mixture<double> mix{{{Vector2(-1, 0), Matrix::Identity(2, 2)}, {Vector2(1, 0), Matrix::Identity(2, 2)}},
                      Vector2(0.5, 0.5)};
  SampleSet<double> s;
  s.points = Vector2(0, 0.7);
  s.source = {0};
  const auto r = responsibilities<double>(mix, s, Vector::Constant(1, 0.3));
  EXPECT_DOUBLE_EQ(r.gamma(0, 0), r.gamma(0, 1));
  EXPECT_NEAR(r.gamma(0, 0), 0.3, 1e-15);
}

TEST(Responsibilities, RandomizedAgainstOracle) {
  Rng rng(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(4));
    const int d = 1 + static_cast<int>(rng.below(3));
    const auto mix = random_mixture(m, d, rng);
    std::vector<int> counts(m, 2);
    const auto s = sample_mixture(mix, counts, rng);
    Vector p(s.size());
    for (int i = 0; i < s.size(); ++i) p[i] = rng.uniform();
    const auto r = responsibilities<double>(mix, s, p);
    const auto want = gamma_oracle(mix, s.points, p);
    for (Eigen::Index i = 0; i < want.rows(); ++i)
      for (Eigen::Index j = 0; j < want.cols(); ++j) ASSERT_TRUE(test::near_rel(r.gamma(i, j), want(i, j)));
  }
}

TEST(ImportanceEstimate, Examples) {
  EXPECT_TRUE(test::near_rel(importance_estimate(as_resp(MatrixX<double>::Constant(3, 1, 0.2)))[0], 1.0));
  MatrixX<double> g(2, 2);
  g << 2, 0.5, 1, 0.5;
  const Vector e = importance_estimate(as_resp(g));
  EXPECT_DOUBLE_EQ(e[0], 0.75);
  EXPECT_DOUBLE_EQ(e[1], 0.25);
  const Vector u = importance_estimate(as_resp(MatrixX<double>::Constant(5, 4, 0.3)));
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(u[j], 0.25);
}

TEST(ImportanceEstimate, AllZeroIsDegenerate) {
  EXPECT_THROW(importance_estimate(as_resp(MatrixX<double>::Zero(4, 2))), DegenerateBatch);
}

TEST(ImportanceUpdate, Examples) {
  const Vector prev = Vector2(0.5, 0.5), est = Vector2(1.0, 0.0);
  EXPECT_DOUBLE_EQ(importance_update(prev, est, 0.4)[0], 0.7);
  EXPECT_EQ(importance_update(prev, est, 1.0), est);
  EXPECT_NEAR((importance_update(prev, est, 1e-15) - prev).norm(), 0.0, 1e-14);
}

TEST(ImportanceEstimateUpdate, RandomizedAgainstOracle) {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(20)), m = 1 + static_cast<int>(rng.below(5));
    MatrixX<double> g(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) g(i, j) = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    if (g.sum() == 0) g(0, 0) = 1;
    const Vector est = importance_estimate(as_resp(g));
    double total = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) total += g(i, j);
    Vector prev(m);
    for (int j = 0; j < m; ++j) prev[j] = rng.uniform(0.01, 1);
    prev /= prev.sum();
    const double eta = rng.uniform(0.01, 1.0);
    const Vector upd = importance_update(prev, est, eta);
    for (int j = 0; j < m; ++j) {
      double col = 0;
      for (int i = 0; i < n; ++i) col += g(i, j);
      ASSERT_TRUE(test::near_rel(est[j], col / total));
      ASSERT_TRUE(test::near_rel(upd[j], eta * col / total + (1 - eta) * prev[j]));
    }
    EXPECT_NEAR(upd.sum(), 1.0, 1e-12);
  }
}

TEST(RenewAndFilter, Examples) {
  MatrixX<double> g(2, 1);
  g << 0.2, 0.2;
  SampleSet<double> s;
  s.points = Matrix::Zero(1, 2);
  s.source = {0, 0};
  auto r = renew_and_filter<double>(as_resp(g), Vector::Constant(1, 0.5), s);
  EXPECT_DOUBLE_EQ(r.resp.gamma(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(r.resp.gamma(1, 0), 0.25);
  EXPECT_EQ(r.samples.size(), 2);

  MatrixX<double> z(3, 2);
  z << 0.1, 0.3, 0, 0, 0.2, 0.1;
  s.points = (Matrix(1, 3) << 7, 8, 9).finished();
  s.source = {0, 1, 1};
  r = renew_and_filter<double>(as_resp(z), Vector2(0.5, 0.5), s);
  ASSERT_EQ(r.samples.size(), 2);
  EXPECT_EQ(r.kept, (std::vector<int>{0, 2}));
  EXPECT_EQ(r.samples.points(0, 1), 9);
  EXPECT_EQ(r.samples.source, (std::vector<int>{0, 1}));
}

TEST(RenewAndFilter, RandomizedColumnSumsAndRetention) {
  Rng rng(43);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(30)), m = 1 + static_cast<int>(rng.below(4));
    MatrixX<double> g(n, m);
    for (int i = 0; i < n; ++i) {
      const bool dead = rng.uniform() < 0.15;
      for (int j = 0; j < m; ++j) g(i, j) = dead ? 0.0 : rng.uniform();
    }
    g(0, 0) = std::max(g(0, 0), 0.5);
    Vector pi(m);
    for (int j = 0; j < m; ++j) pi[j] = rng.uniform(0.1, 1);
    pi /= pi.sum();
    SampleSet<double> s;
    s.points = Matrix::Zero(2, n);
    s.source.assign(n, 0);
    const auto r = renew_and_filter<double>(as_resp(g), pi, s);
    int alive = 0;
    for (int i = 0; i < n; ++i) alive += g.row(i).maxCoeff() > 0;
    EXPECT_EQ(r.samples.size(), alive);
    for (int j = 0; j < m; ++j) {
      if (g.col(j).sum() > 0) ASSERT_TRUE(test::near_rel(r.resp.gamma.col(j).sum(), pi[j]));
      for (int k = 0; k < r.samples.size(); ++k) {
        const int i = r.kept[k];
        ASSERT_TRUE(test::near_rel(r.resp.gamma(k, j), g(i, j) * pi[j] / g.col(j).sum()));
      }
    }
  }
}

TEST(EstimateMoments, Examples) {
  MatrixX<double> g(1, 1);
  g << 0.3;
  SampleSet<double> s;
  s.points = Vector2(0.4, -0.2);
  s.source = {0};
  auto e = estimate_moments<double>(as_resp(g), s, {0}, 0, Vector2(0, 0));
  ASSERT_TRUE(e);
  EXPECT_EQ(e->mu, Vector2(0.4, -0.2));

  MatrixX<double> g2(2, 1);
  g2 << 0.5, 0.5;
  SampleSet<double> s2;
  s2.points = (Matrix(1, 2) << -1, 1).finished();
  s2.source = {0, 0};
  e = estimate_moments<double>(as_resp(g2), s2, {0, 1}, 0, Vector::Zero(1));
  EXPECT_DOUBLE_EQ(e->mu[0], 0.0);
  EXPECT_DOUBLE_EQ(e->sigma(0, 0), 1.0);

  // scatter is measured about the prior mean, not the new one
  e = estimate_moments<double>(as_resp(g2), s2, {0, 1}, 0, Vector::Constant(1, 1.0));
  EXPECT_DOUBLE_EQ(e->mu[0], 0.0);
  EXPECT_DOUBLE_EQ(e->sigma(0, 0), 2.0);

  MatrixX<double> zero = MatrixX<double>::Zero(2, 1);
  EXPECT_FALSE(estimate_moments<double>(as_resp(zero), s2, {0, 1}, 0, Vector::Zero(1)));
}

TEST(EstimateMoments, ScatterAboutPriorDiffersByMeanShift) {
  Rng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 5 + static_cast<int>(rng.below(20));
    MatrixX<double> g(n, 1);
    SampleSet<double> s;
    s.points.resize(2, n);
    for (int i = 0; i < n; ++i) {
      g(i, 0) = rng.uniform();
      s.points.col(i) = Vector2(rng.normal(), rng.normal());
    }
    s.source.assign(n, 0);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    const Vector2 prior(rng.normal(), rng.normal());
    const auto about_prior = estimate_moments<double>(as_resp(g), s, all, 0, prior);
    const auto about_mean = estimate_moments<double>(as_resp(g), s, all, 0, about_prior->mu);
    const Vector shift = about_prior->mu - prior;
    EXPECT_NEAR((about_prior->sigma - about_mean->sigma - shift * shift.transpose()).norm(), 0.0, 1e-10);
  }
}

TEST(UpdateMoments, Examples) {
  LearningFactors f{0.4, 0.2, 0.1};
  GaussianComponent<double> prev{Vector::Zero(1), Matrix::Identity(1, 1)};
  GaussianComponent<double> est{Vector::Ones(1), 3 * Matrix::Identity(1, 1)};
  auto out = update_moments(prev, est, f);
  EXPECT_DOUBLE_EQ(out.mu[0], 0.8);
  EXPECT_DOUBLE_EQ(out.sigma(0, 0), 2.8);
  f.eta_mu = 1.0;
  EXPECT_EQ(update_moments(prev, est, f).mu, prev.mu);
}

TEST(UpdateMoments, OutputIsSymmetricAndFloored) {
  Rng rng(45);
  const double floor = 1e-6;
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(5));
    GaussianComponent<double> prev{Vector::Zero(d), test::random_spd(d, rng)};
    // rank-one estimate scatter
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    GaussianComponent<double> est{v, v * v.transpose()};
    LearningFactors f{0.4, rng.uniform(), rng.uniform() < 0.3 ? 0.0 : rng.uniform()};
    const auto out = update_moments(prev, est, f, floor);
    EXPECT_EQ(out.sigma, out.sigma.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(out.sigma);
    EXPECT_GE(es.eigenvalues().minCoeff(), floor - 1e-12);
  }
}

TEST(LargestRemainder, SumsExactlyAndIsProportional) {
  Rng rng(46);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(10));
    Vector w(m);
    for (int j = 0; j < m; ++j) w[j] = rng.uniform();
    const int total = static_cast<int>(rng.below(2000));
    const auto c = largest_remainder_counts(total, w);
    EXPECT_EQ(std::accumulate(c.begin(), c.end(), 0), total);
    for (int j = 0; j < m; ++j) EXPECT_LT(std::abs(c[j] - total * w[j] / w.sum()), 1.0);
  }
}

TEST(LearningFactorsValidate, Ranges) {
  EXPECT_NO_THROW((LearningFactors{1.0, 0.0, 0.0}.validate()));
  EXPECT_THROW((LearningFactors{0.0, 0.2, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((LearningFactors{0.4, 1.2, 0.1}.validate()), std::invalid_argument);
}

TEST(MixtureValidate, WeightsMustSumToOne) {
  Mixture<double> mix{{{Vector::Zero(1), Matrix::Identity(1, 1)}, {Vector::Ones(1), Matrix::Identity(1, 1)}},
                      Vector2(0.5, 0.4)};
  EXPECT_THROW(mix.validate(), std::invalid_argument);
  mix.weights = Vector2(0.5, 0.5);
  EXPECT_NO_THROW(mix.validate());
}

TEST(GmmFloat, TemplatedOnScalar) {
  Mixture<float> mix{{{VectorX<float>::Zero(2), MatrixX<float>::Identity(2, 2)}}, VectorX<float>::Ones(1)};
  Rng rng(7);
  const auto s = sample_mixture(mix, {10}, rng);
  const auto r = responsibilities<float>(mix, s, VectorX<float>::Constant(10, 0.5f));
  EXPECT_NEAR(importance_estimate(r)[0], 1.0f, 1e-6f);
}
