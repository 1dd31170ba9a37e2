#pragma once

// Gaussian mixture machinery for the expansion loop: sampling, responsibilities,
// importance estimation and update, renewal, and incremental moment learning.
// Everything here is templated on the scalar type; samples are stored as the
// columns of a D x N matrix.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "bnmco/rng.hpp"
#include "bnmco/types.hpp"

namespace bnmco {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Neumaier-compensated accumulator; column sums stay reduction-order stable.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Scalar value() const { return sum_ + carry_; }

 private:
  Scalar sum_ = 0;
  Scalar carry_ = 0;
};

template <typename Derived>
typename Derived::Scalar compensated_sum(const Eigen::DenseBase<Derived>& v) {
  CompensatedSum<typename Derived::Scalar> acc;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc.add(v.derived().coeff(i));
  return acc.value();
}

struct LearningFactors {
  double eta_pi = 0.4;
  double eta_mu = 0.2;
  double eta_sigma = 0.1;

  /// eta_pi in (0, 1]; eta_mu and eta_sigma in [0, 1], where 0 means no
  /// blending toward the prior.
  void validate() const {
    if (!(eta_pi > 0.0 && eta_pi <= 1.0)) throw std::invalid_argument("eta_pi must lie in (0, 1]");
    for (double f : {eta_mu, eta_sigma}) {
      if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("eta_mu and eta_sigma must lie in [0, 1]");
    }
  }
};

template <typename Scalar>
struct GaussianComponent {
  VectorX<Scalar> mu;
  MatrixX<Scalar> sigma;
};

template <typename Scalar>
struct Mixture {
  std::vector<GaussianComponent<Scalar>> components;
  VectorX<Scalar> weights;

  int size() const { return static_cast<int>(components.size()); }
  int dim() const { return components.empty() ? 0 : static_cast<int>(components.front().mu.size()); }

  void validate() const {
    if (components.empty()) throw std::invalid_argument("mixture: no components");
    if (weights.size() != size()) throw std::invalid_argument("mixture: one weight per component");
    if ((weights.array() < 0).any()) throw std::invalid_argument("mixture: negative weight");
    if (std::abs(compensated_sum(weights) - Scalar(1)) > Scalar(1e-9)) {
      throw std::invalid_argument("mixture: weights must sum to 1");
    }
  }
};

/// Cached Cholesky factor and normalizer of one component.
template <typename Scalar>
class GaussianDensity {
 public:
  explicit GaussianDensity(const GaussianComponent<Scalar>& c) : mu_(c.mu), llt_(c.sigma) {
    if (llt_.info() != Eigen::Success) throw Error("covariance factorization failed");
    const auto d = static_cast<Scalar>(c.mu.size());
    const Scalar log_det = 2 * llt_.matrixLLT().diagonal().array().log().sum();
    log_norm_ = -Scalar(0.5) * (d * std::log(2 * std::numbers::pi_v<Scalar>) + log_det);
  }

  Scalar log_pdf(const VectorX<Scalar>& x) const {
    const VectorX<Scalar> z = llt_.matrixL().solve(x - mu_);
    return log_norm_ - Scalar(0.5) * z.squaredNorm();
  }

  /// Column-wise log density of a D x N block.
  VectorX<Scalar> log_pdf_columns(const MatrixX<Scalar>& x) const {
    MatrixX<Scalar> z = x.colwise() - mu_;
    llt_.matrixL().solveInPlace(z);
    return (log_norm_ - Scalar(0.5) * z.colwise().squaredNorm().array()).matrix().transpose();
  }

  const Eigen::LLT<MatrixX<Scalar>>& factor() const { return llt_; }

 private:
  VectorX<Scalar> mu_;
  Eigen::LLT<MatrixX<Scalar>> llt_;
  Scalar log_norm_ = 0;
};

template <typename Scalar>
struct SampleSet {
  MatrixX<Scalar> points;   // D x N
  std::vector<int> source;  // generating component per column

  int size() const { return static_cast<int>(points.cols()); }
};

template <typename Scalar>
struct Responsibilities {
  MatrixX<Scalar> gamma;  // N x M
  std::vector<int> source;
};

/// Integer counts proportional to `weights` that sum exactly to `total`
/// (largest-remainder rounding, ties to the lower index).
template <typename Scalar>
std::vector<int> largest_remainder_counts(int total, const VectorX<Scalar>& weights) {
  const auto m = weights.size();
  std::vector<int> counts(m, 0);
  if (m == 0 || total <= 0) return counts;
  const Scalar sum = compensated_sum(weights);
  std::vector<std::pair<Scalar, int>> rema;
  int assigned = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Scalar share = sum > 0 ? total * weights[i] / sum : Scalar(0);
    counts[i] = static_cast<int>(std::floor(share));
    assigned += counts[i];
    rema.emplace_back(share - counts[i], static_cast<int>(i));
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int r = 0; assigned < total && r < static_cast<int>(rema.size()); ++r, ++assigned) counts[rema[r].second]++;
  return counts;
}

/// counts[m] draws from component m via mu + L z.
template <typename Scalar>
SampleSet<Scalar> sample_mixture(const Mixture<Scalar>& mix, const std::vector<int>& counts, Rng& rng) {
  if (static_cast<int>(counts.size()) != mix.size()) {
    throw std::invalid_argument("sample_mixture: one count per component");
  }
  int total = 0;
  for (int c : counts) total += c;
  SampleSet<Scalar> out;
  out.points.resize(mix.dim(), total);
  out.source.reserve(total);
  int col = 0;
  VectorX<Scalar> z(mix.dim());
  for (int m = 0; m < mix.size(); ++m) {
    if (counts[m] == 0) continue;
    Eigen::LLT<MatrixX<Scalar>> llt(mix.components[m].sigma);
    if (llt.info() != Eigen::Success) throw Error("sample_mixture: covariance factorization failed");
    const MatrixX<Scalar> lower = llt.matrixL();
    for (int s = 0; s < counts[m]; ++s) {
      for (Eigen::Index d = 0; d < z.size(); ++d) z[d] = static_cast<Scalar>(rng.normal());
      out.points.col(col++) = mix.components[m].mu + lower * z;
      out.source.push_back(m);
    }
  }
  return out;
}

/// gamma[n, m] = p(n) N_m(x_n) / sum_m' pi_m' N_m'(x_n), evaluated in log space.
template <typename Scalar>
Responsibilities<Scalar> responsibilities(const Mixture<Scalar>& mix, const SampleSet<Scalar>& samples,
                                          const VectorX<Scalar>& density) {
  const int n = samples.size();
  const int m = mix.size();
  if (density.size() != n) throw std::invalid_argument("responsibilities: one density value per sample");
  MatrixX<Scalar> log_pdf(n, m);
  for (int j = 0; j < m; ++j) log_pdf.col(j) = GaussianDensity<Scalar>(mix.components[j]).log_pdf_columns(samples.points);

  constexpr Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
  Responsibilities<Scalar> r;
  r.gamma = MatrixX<Scalar>::Zero(n, m);
  r.source = samples.source;
  for (int i = 0; i < n; ++i) {
    if (!(density[i] > 0)) continue;
    Scalar peak = neg_inf;
    for (int j = 0; j < m; ++j) {
      if (mix.weights[j] > 0) peak = std::max(peak, std::log(mix.weights[j]) + log_pdf(i, j));
    }
    if (peak == neg_inf) continue;
    CompensatedSum<Scalar> acc;
    for (int j = 0; j < m; ++j) {
      if (mix.weights[j] > 0) acc.add(std::exp(std::log(mix.weights[j]) + log_pdf(i, j) - peak));
    }
    const Scalar log_mix = peak + std::log(acc.value());
    for (int j = 0; j < m; ++j) r.gamma(i, j) = density[i] * std::exp(log_pdf(i, j) - log_mix);
  }
  return r;
}

template <typename Scalar>
VectorX<Scalar> column_sums(const MatrixX<Scalar>& gamma) {
  VectorX<Scalar> s(gamma.cols());
  for (Eigen::Index j = 0; j < gamma.cols(); ++j) s[j] = compensated_sum(gamma.col(j));
  return s;
}

/// Normalized column sums of gamma. Throws DegenerateBatch when gamma is all zero.
template <typename Scalar>
VectorX<Scalar> importance_estimate(const Responsibilities<Scalar>& resp) {
  const VectorX<Scalar> s = column_sums(resp.gamma);
  const Scalar total = compensated_sum(s);
  if (!(total > 0)) throw DegenerateBatch("importance_estimate: every sample has zero mass");
  return s / total;
}

/// eta * estimate + (1 - eta) * previous.
template <typename Scalar>
VectorX<Scalar> importance_update(const VectorX<Scalar>& previous, const VectorX<Scalar>& estimate, Scalar eta) {
  if (previous.size() != estimate.size()) throw std::invalid_argument("importance_update: size mismatch");
  return eta * estimate + (Scalar(1) - eta) * previous;
}

template <typename Scalar>
struct Renewed {
  Responsibilities<Scalar> resp;
  SampleSet<Scalar> samples;
  std::vector<int> kept;  // original column index of every retained sample
};

/// Rescale every column to sum to pi[m], then drop samples whose largest
/// entry is at most gamma_floor times the largest entry of the batch.
template <typename Scalar>
Renewed<Scalar> renew_and_filter(const Responsibilities<Scalar>& resp, const VectorX<Scalar>& pi,
                                 const SampleSet<Scalar>& samples, Scalar gamma_floor = Scalar(1e-12)) {
  if (pi.size() != resp.gamma.cols()) throw std::invalid_argument("renew_and_filter: one weight per column");
  MatrixX<Scalar> g = resp.gamma;
  const VectorX<Scalar> sums = column_sums(g);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    if (sums[j] > 0) g.col(j) *= pi[j] / sums[j];
  }
  const Scalar peak = g.size() > 0 ? g.maxCoeff() : Scalar(0);
  const Scalar cut = gamma_floor * peak;
  Renewed<Scalar> out;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    if (peak > 0 && g.row(i).maxCoeff() > cut) out.kept.push_back(static_cast<int>(i));
  }
  const auto kept = static_cast<Eigen::Index>(out.kept.size());
  out.resp.gamma.resize(kept, g.cols());
  out.samples.points.resize(samples.points.rows(), kept);
  for (Eigen::Index r = 0; r < kept; ++r) {
    const int i = out.kept[r];
    out.resp.gamma.row(r) = g.row(i);
    out.samples.points.col(r) = samples.points.col(i);
    out.resp.source.push_back(resp.source[i]);
    out.samples.source.push_back(samples.source[i]);
  }
  return out;
}

/// Weighted mean of the cluster under component m and the weighted scatter
/// about the prior mean. Empty when the cluster carries no mass for m.
template <typename Scalar>
std::optional<GaussianComponent<Scalar>> estimate_moments(const Responsibilities<Scalar>& resp,
                                                          const SampleSet<Scalar>& samples,
                                                          const std::vector<int>& cluster, int m,
                                                          const VectorX<Scalar>& mu_prev) {
  CompensatedSum<Scalar> mass;
  for (int n : cluster) mass.add(resp.gamma(n, m));
  const Scalar w = mass.value();
  if (!(w > 0)) return std::nullopt;
  const auto d = samples.points.rows();
  VectorX<Scalar> mean = VectorX<Scalar>::Zero(d);
  MatrixX<Scalar> scatter = MatrixX<Scalar>::Zero(d, d);
  for (int n : cluster) {
    const Scalar g = resp.gamma(n, m);
    if (g == 0) continue;
    mean += g * samples.points.col(n);
    const VectorX<Scalar> dev = samples.points.col(n) - mu_prev;
    scatter.noalias() += g * dev * dev.transpose();
  }
  GaussianComponent<Scalar> est{mean / w, scatter / w};
  est.sigma = (Scalar(0.5) * (est.sigma + est.sigma.transpose())).eval();
  return est;
}

/// Symmetrize and clamp eigenvalues from below. Left untouched when already
/// above the floor.
template <typename Scalar>
MatrixX<Scalar> floor_covariance(const MatrixX<Scalar>& sigma, Scalar floor) {
  MatrixX<Scalar> s = Scalar(0.5) * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(s);
  if (es.eigenvalues().minCoeff() >= floor) return s;
  const VectorX<Scalar> clamped = es.eigenvalues().cwiseMax(floor);
  s = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  return Scalar(0.5) * (s + s.transpose());
}

/// Blend toward the prior: mu = eta_mu mu_prev + (1 - eta_mu) mu_est, and the
/// same with eta_sigma for the covariance. Note the weight sits on the prior,
/// the opposite of importance_update.
template <typename Scalar>
GaussianComponent<Scalar> update_moments(const GaussianComponent<Scalar>& prev, const GaussianComponent<Scalar>& est,
                                         const LearningFactors& f, Scalar sigma_floor = Scalar(1e-6)) {
  if (prev.mu.size() != est.mu.size() || prev.sigma.rows() != est.sigma.rows()) {
    throw std::invalid_argument("update_moments: shape mismatch");
  }
  const auto eta_mu = static_cast<Scalar>(f.eta_mu);
  const auto eta_sigma = static_cast<Scalar>(f.eta_sigma);
  GaussianComponent<Scalar> out;
  out.mu = eta_mu * prev.mu + (Scalar(1) - eta_mu) * est.mu;
  out.sigma = floor_covariance<Scalar>(eta_sigma * prev.sigma + (Scalar(1) - eta_sigma) * est.sigma, sigma_floor);
  return out;
}

}  // namespace bnmco
