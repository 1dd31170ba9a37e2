#include "bnmco/bayes_net.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace bnmco {

void ExpansionConfig::validate() const {
  if (samples < 2) throw std::invalid_argument("expansion: N must be >= 2");
  if (max_iterations < 1) throw std::invalid_argument("expansion: N_mco must be >= 1");
  if (neighbors < 1) throw std::invalid_argument("expansion: k must be >= 1");
  if (!(etol >= 1.0)) throw std::invalid_argument("expansion: Etol must be >= 1");
  if (!(rho0 > 0.0) || !(eta_rho >= 0.0)) throw std::invalid_argument("expansion: rho0 > 0 and eta_rho >= 0 required");
  if (!(sigma_floor > 0.0)) throw std::invalid_argument("expansion: sigma_floor must be > 0");
  if (!(gamma_floor >= 0.0 && gamma_floor < 1.0)) throw std::invalid_argument("expansion: gamma_floor must lie in [0, 1)");
  factors.validate();
}

std::optional<EdgeStretch> stretch_edge(const Responsibilities<double>& resp, const std::vector<int>& cluster, int m,
                                        int batch) {
  CompensatedSum<double> mass;
  for (int n : cluster) mass.add(resp.gamma(n, m));
  if (!(mass.value() > 0.0)) return std::nullopt;
  EdgeStretch e;
  e.length = std::max(-std::log(mass.value()), 0.0);
  e.importance = std::exp(-e.length);
  e.samples = static_cast<int>(std::lround(batch * e.importance));
  return e;
}

namespace {

Matrix gather(const Matrix& points, const std::vector<int>& cols) {
  Matrix out(points.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = points.col(cols[i]);
  return out;
}

std::vector<int> satisfying_members(const std::vector<char>& satisfied, const std::vector<int>& members) {
  std::vector<int> out;
  for (size_t i = 0; i < members.size(); ++i) {
    if (satisfied[members[i]]) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

NetExpansion::NetExpansion(PotentialField pf, const SeedSet& seeds, ExpansionConfig cfg, Rng rng)
    : pf_(std::move(pf)), cfg_(cfg), rng_(std::move(rng)) {
  cfg_.validate();
  annealer_ = Annealer{cfg_.rho0, cfg_.eta_rho, 0};
  net_.direction = pf_.direction();
  if (seeds.points.cols() == 0) throw std::invalid_argument("expansion: no seed waypoints");
  require_dim(seeds.points.rows(), pf_.dim(), "seed waypoints");
  if (static_cast<Eigen::Index>(seeds.ids.size()) != seeds.points.cols()) {
    throw std::invalid_argument("expansion: one id per seed waypoint");
  }

  const double rho = annealer_.rho();
  const auto s = seeds.points.cols();
  Vector density(s);
  std::vector<char> satisfied(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const FieldTerms t = pf_.terms(seeds.points.col(i));
    density[i] = density_from_value(pf_.value(t), rho);
    satisfied[i] = pf_.satisfied(t);
  }
  const double peak = density.maxCoeff();
  std::vector<int> kept;
  for (Eigen::Index i = 0; i < s; ++i) {
    if (peak > 0.0 && density[i] > cfg_.gamma_floor * peak) kept.push_back(static_cast<int>(i));
  }
  if (kept.empty()) throw ExpansionFailed("expansion: no seed waypoint carries mass under the field", net_);

  const Matrix pts = gather(seeds.points, kept);
  Vector w(static_cast<Eigen::Index>(kept.size()));
  for (size_t i = 0; i < kept.size(); ++i) w[static_cast<Eigen::Index>(i)] = density[kept[i]];
  const double total = compensated_sum(w);
  const Vector gamma = w / total;

  std::vector<char> kept_satisfied(kept.size());
  for (size_t i = 0; i < kept.size(); ++i) kept_satisfied[i] = satisfied[kept[i]];

  const auto groups = cluster<double>(pts, cfg_.neighbors);
  std::vector<double> masses;
  for (const auto& g : groups) {
    CompensatedSum<double> acc;
    for (int n : g) acc.add(gamma[n]);
    const double mass = acc.value();
    if (std::lround(cfg_.samples * mass) <= cfg_.etol) continue;

    Vector mean = Vector::Zero(pf_.dim());
    for (int n : g) mean += gamma[n] * pts.col(n);
    mean /= mass;
    Matrix cov = Matrix::Zero(pf_.dim(), pf_.dim());
    for (int n : g) {
      const Vector d = pts.col(n) - mean;
      cov.noalias() += gamma[n] * d * d.transpose();
    }
    cov /= mass;

    NetNode node;
    node.id = static_cast<int>(net_.nodes.size());
    node.component = {mean, floor_covariance<double>(cov, cfg_.sigma_floor)};
    node.layer = 0;
    node.waypoints = gather(pts, g);
    for (int n : g) {
      node.seed_ids.push_back(seeds.ids[kept[n]]);
      node.seed_mass.push_back(gamma[n]);
    }
    node.satisfying = satisfying_members(kept_satisfied, g);
    net_.nodes.push_back(std::move(node));
    masses.push_back(mass);
  }
  if (net_.nodes.empty()) throw ExpansionFailed("expansion: no seed cluster reaches Etol", net_);

  const double msum = std::accumulate(masses.begin(), masses.end(), 0.0);
  mix_.weights.resize(static_cast<Eigen::Index>(masses.size()));
  for (size_t i = 0; i < masses.size(); ++i) {
    net_.nodes[i].importance = masses[i] / msum;
    mix_.weights[static_cast<Eigen::Index>(i)] = masses[i] / msum;
    mix_.components.push_back(net_.nodes[i].component);
    mix_nodes_.push_back(static_cast<int>(i));
  }
}

NetExpansion::NetExpansion(PotentialField pf, Mixture<double> initial, ExpansionConfig cfg, Rng rng)
    : pf_(std::move(pf)), cfg_(cfg), rng_(std::move(rng)), mix_(std::move(initial)) {
  cfg_.validate();
  mix_.validate();
  require_dim(mix_.dim(), pf_.dim(), "initial mixture");
  annealer_ = Annealer{cfg_.rho0, cfg_.eta_rho, 0};
  net_.direction = pf_.direction();
  for (int m = 0; m < mix_.size(); ++m) {
    NetNode node;
    node.id = m;
    node.component = mix_.components[m];
    node.importance = mix_.weights[m];
    node.waypoints = mix_.components[m].mu;
    net_.nodes.push_back(std::move(node));
    mix_nodes_.push_back(m);
  }
}

NetExpansion::Batch NetExpansion::draw(const Mixture<double>& mix, const std::vector<int>& counts) {
  Batch b;
  b.samples = sample_mixture(mix, counts, rng_);
  const double rho = annealer_.rho();
  const int n = b.samples.size();
  b.density.resize(n);
  b.satisfied.resize(n);
  for (int i = 0; i < n; ++i) {
    const FieldTerms t = pf_.terms(b.samples.points.col(i));
    b.density[i] = density_from_value(pf_.value(t), rho);
    b.satisfied[i] = pf_.satisfied(t);
  }
  b.resp = responsibilities(mix, b.samples, b.density);
  b.pi_estimate = importance_estimate(b.resp);
  return b;
}

IterationReport NetExpansion::step() {
  if (done()) throw std::logic_error("expansion: step after completion");
  IterationReport rep;
  rep.iteration = net_.iterations + 1;
  rep.rho = annealer_.rho();
  rep.prior_weights = mix_.weights;
  rep.counts = largest_remainder_counts(cfg_.samples, mix_.weights);

  Batch b;
  try {
    b = draw(mix_, rep.counts);
  } catch (const DegenerateBatch&) {
    for (auto& c : mix_.components) c.sigma *= 2.0;
    rep.resampled = true;
    try {
      b = draw(mix_, rep.counts);
    } catch (const DegenerateBatch&) {
      throw ExpansionFailed("expansion: two consecutive batches without feasible samples", net_);
    }
  }

  rep.samples = b.samples;
  rep.density = b.density;
  rep.raw = b.resp;
  rep.pi_estimate = b.pi_estimate;
  rep.pi_updated = importance_update<double>(mix_.weights, b.pi_estimate, cfg_.factors.eta_pi);
  rep.renewed = renew_and_filter<double>(b.resp, rep.pi_updated, b.samples, cfg_.gamma_floor);
  const auto& kept = rep.renewed.kept;
  std::vector<char> satisfied(kept.size());
  for (size_t i = 0; i < kept.size(); ++i) satisfied[i] = b.satisfied[kept[i]];

  rep.clusters = cluster<double>(rep.renewed.samples.points, cfg_.neighbors);

  std::vector<int> admitted;
  std::vector<double> admitted_weight;
  const int layer = rep.iteration;
  for (int l = 0; l < static_cast<int>(rep.clusters.size()); ++l) {
    const auto& members = rep.clusters[l];
    for (int m = 0; m < mix_.size(); ++m) {
      const auto edge = stretch_edge(rep.renewed.resp, members, m, cfg_.samples);
      if (!edge) continue;
      ChildReport child{l, m, *edge, false, -1};
      if (edge->samples > cfg_.etol) {
        const auto est = estimate_moments<double>(rep.renewed.resp, rep.renewed.samples, members, m,
                                                  mix_.components[m].mu);
        NetNode node;
        node.id = static_cast<int>(net_.nodes.size());
        node.component = update_moments<double>(mix_.components[m], *est, cfg_.factors, cfg_.sigma_floor);
        node.importance = edge->importance;
        node.layer = layer;
        node.parent = mix_nodes_[m];
        node.waypoints = gather(rep.renewed.samples.points, members);
        node.satisfying = satisfying_members(satisfied, members);
        net_.edges.push_back({node.parent, node.id, edge->length});
        if (!node.satisfying.empty() && !net_.terminated) {
          net_.terminated = true;
          net_.origin = node.id;
        }
        child.admitted = true;
        child.node = node.id;
        admitted.push_back(node.id);
        admitted_weight.push_back(edge->importance);
        net_.nodes.push_back(std::move(node));
      }
      rep.children.push_back(child);
    }
  }
  net_.iterations = rep.iteration;
  rep.terminated = net_.terminated;

  if (admitted.empty()) {
    throw ExpansionFailed("expansion: no node reached Etol in iteration " + std::to_string(rep.iteration), net_);
  }
  const double wsum = std::accumulate(admitted_weight.begin(), admitted_weight.end(), 0.0);
  rep.rebuilt_weights.resize(static_cast<Eigen::Index>(admitted.size()));
  for (size_t i = 0; i < admitted.size(); ++i) rep.rebuilt_weights[static_cast<Eigen::Index>(i)] = admitted_weight[i] / wsum;
  if (!net_.terminated) {
    mix_.components.clear();
    for (int id : admitted) mix_.components.push_back(net_.nodes[id].component);
    mix_.weights = rep.rebuilt_weights;
    mix_nodes_ = admitted;
    ++annealer_.iteration;
  }
  return rep;
}

BayesNet exp_bayes_net(const PotentialField& pf, const SeedSet& seeds, const ExpansionConfig& cfg, Rng& rng) {
  NetExpansion ex(pf, seeds, cfg, rng.split(0));
  while (!ex.done()) ex.step();
  return std::move(ex).release();
}

void write_net(std::ostream& os, const BayesNet& net) {
  const auto prec = os.precision(17);
  os << "net " << (net.direction == FieldDirection::Forward ? "forward" : "backward") << ' '
     << (net.terminated ? 1 : 0) << ' ' << net.origin << ' ' << net.iterations << '\n';
  for (const auto& n : net.nodes) {
    const auto d = n.component.mu.size();
    os << "node " << n.id << ' ' << n.layer << ' ' << n.importance << ' ' << n.waypoints.cols() << ' '
       << n.satisfying.size() << ' ' << d;
    for (Eigen::Index i = 0; i < d; ++i) os << ' ' << n.component.mu[i];
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) os << ' ' << n.component.sigma(i, j);
    }
    os << '\n';
  }
  for (const auto& e : net.edges) os << "edge " << e.from << ' ' << e.to << ' ' << e.length << '\n';
  os.precision(prec);
}

BayesNet read_net(std::istream& is) {
  BayesNet net;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw Error("net dump line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "net") {
      std::string dir;
      int term = 0;
      ss >> dir >> term >> net.origin >> net.iterations;
      if (!ss || (dir != "forward" && dir != "backward")) fail("malformed net header");
      net.direction = dir == "forward" ? FieldDirection::Forward : FieldDirection::Backward;
      net.terminated = term != 0;
    } else if (tag == "node") {
      NetNode n;
      long count = 0, nsat = 0, d = 0;
      ss >> n.id >> n.layer >> n.importance >> count >> nsat >> d;
      if (!ss || d <= 0) fail("malformed node record");
      n.component.mu.resize(d);
      n.component.sigma.resize(d, d);
      for (long i = 0; i < d; ++i) ss >> n.component.mu[i];
      for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) ss >> n.component.sigma(i, j);
      }
      if (!ss) fail("truncated node record");
      n.waypoints = Matrix::Zero(d, 0);
      net.nodes.push_back(std::move(n));
    } else if (tag == "edge") {
      NetEdge e;
      ss >> e.from >> e.to >> e.length;
      if (!ss) fail("malformed edge record");
      net.edges.push_back(e);
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  return net;
}

}  // namespace bnmco
