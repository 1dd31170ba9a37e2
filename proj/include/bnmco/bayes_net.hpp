#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "bnmco/cluster.hpp"
#include "bnmco/gmm.hpp"
#include "bnmco/potential_field.hpp"
#include "bnmco/rng.hpp"

namespace bnmco {

/// Uniformly drawn waypoints with permanent identities.
struct SeedSet {
  Matrix points;         // D x S
  std::vector<int> ids;  // one per column
};

struct NetNode {
  int id = -1;
  GaussianComponent<double> component;
  double importance = 0.0;
  int layer = 0;
  int parent = -1;
  /// Retained samples of the cluster the node was learned from.
  Matrix waypoints;
  /// Seed identities among the cached waypoints (layer-0 nodes only),
  /// ascending, with their normalized likelihood mass.
  std::vector<int> seed_ids;
  std::vector<double> seed_mass;
  /// Column indices of cached waypoints that satisfy the field.
  std::vector<int> satisfying;
};

struct NetEdge {
  int from = -1;
  int to = -1;
  double length = 0.0;
};

struct BayesNet {
  FieldDirection direction = FieldDirection::Forward;
  std::vector<NetNode> nodes;
  std::vector<NetEdge> edges;
  bool terminated = false;
  int origin = -1;  // first admitted node that satisfied the field
  int iterations = 0;
};

struct ExpansionConfig {
  int samples = 1600;         // N
  int max_iterations = 30;    // N_mco
  int neighbors = 5;          // k
  double etol = 5.0;          // minimum per-node sample count
  LearningFactors factors;
  double rho0 = 5.0;
  double eta_rho = 0.5;
  double sigma_floor = 1e-6;
  double gamma_floor = 1e-12;

  void validate() const;
};

class ExpansionFailed : public Error {
 public:
  ExpansionFailed(const std::string& what, BayesNet partial) : Error(what), partial_(std::move(partial)) {}
  const BayesNet& partial() const { return partial_; }

 private:
  BayesNet partial_;
};

struct EdgeStretch {
  double length = 0.0;
  double importance = 0.0;
  int samples = 0;
};

/// Edge from prior component m to the node learned from `cluster`: length is
/// -log of the cluster's renewed mass under m, importance exp(-length) and
/// the sample budget N * importance. Empty when the mass is zero.
std::optional<EdgeStretch> stretch_edge(const Responsibilities<double>& resp, const std::vector<int>& cluster, int m,
                                        int batch);

struct ChildReport {
  int cluster = -1;
  int prior = -1;
  EdgeStretch stretch;
  bool admitted = false;
  int node = -1;
};

/// Everything one expansion iteration computed; used by tests and diagnostics.
struct IterationReport {
  int iteration = 0;
  double rho = 0.0;
  bool resampled = false;
  Vector prior_weights;
  std::vector<int> counts;
  SampleSet<double> samples;
  Vector density;
  Responsibilities<double> raw;
  Vector pi_estimate;
  Vector pi_updated;
  Renewed<double> renewed;
  std::vector<std::vector<int>> clusters;
  std::vector<ChildReport> children;
  Vector rebuilt_weights;
  bool terminated = false;
};

/// Step-wise form of the expansion loop.
class NetExpansion {
 public:
  /// Roots come from clustering the seeds that carry mass under `pf`.
  NetExpansion(PotentialField pf, const SeedSet& seeds, ExpansionConfig cfg, Rng rng);
  /// Roots are the given components; they cache no waypoints.
  NetExpansion(PotentialField pf, Mixture<double> initial, ExpansionConfig cfg, Rng rng);

  bool done() const { return net_.terminated || net_.iterations >= cfg_.max_iterations; }
  IterationReport step();

  const BayesNet& net() const { return net_; }
  const Mixture<double>& mixture() const { return mix_; }
  const Annealer& annealer() const { return annealer_; }
  BayesNet release() && { return std::move(net_); }

 private:
  struct Batch {
    SampleSet<double> samples;
    Vector density;
    std::vector<char> satisfied;
    Responsibilities<double> resp;
    Vector pi_estimate;
  };
  Batch draw(const Mixture<double>& mix, const std::vector<int>& counts);

  PotentialField pf_;
  ExpansionConfig cfg_;
  Rng rng_;
  Annealer annealer_;
  BayesNet net_;
  Mixture<double> mix_;
  std::vector<int> mix_nodes_;
};

BayesNet exp_bayes_net(const PotentialField& pf, const SeedSet& seeds, const ExpansionConfig& cfg, Rng& rng);

/// Text dump: one `node` record and one `edge` record per line.
void write_net(std::ostream& os, const BayesNet& net);
BayesNet read_net(std::istream& is);

}  // namespace bnmco
