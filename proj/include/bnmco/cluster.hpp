#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "bnmco/gmm.hpp"

namespace bnmco {

/// Mutual k-nearest-neighbor clustering of the columns of `points`.
///
/// Each column marks its k nearest columns (Euclidean, ties to the lower
/// index). Two columns are related when each is among the other's k nearest;
/// clusters are the connected components of that relation. The result is a
/// partition: members ascend within a cluster and clusters are ordered by
/// their smallest member. k is clipped to N - 1.
template <typename Scalar>
std::vector<std::vector<int>> cluster(const MatrixX<Scalar>& points, int k) {
  const int n = static_cast<int>(points.cols());
  if (k < 1) throw std::invalid_argument("cluster: k must be >= 1");
  if (n == 0) return {};
  if (n == 1) return {{0}};
  const int kk = std::min(k, n - 1);

  std::vector<char> near(static_cast<size_t>(n) * n, 0);
  std::vector<std::pair<Scalar, int>> row(n - 1);
  for (int i = 0; i < n; ++i) {
    int c = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i) row[c++] = {(points.col(i) - points.col(j)).squaredNorm(), j};
    }
    std::nth_element(row.begin(), row.begin() + (kk - 1), row.end());
    for (int r = 0; r < kk; ++r) near[static_cast<size_t>(i) * n + row[r].second] = 1;
  }

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (near[static_cast<size_t>(i) * n + j] && near[static_cast<size_t>(j) * n + i]) {
        const int a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (label[root] < 0) {
      label[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[label[root]].push_back(i);
  }
  return out;
}

}  // namespace bnmco
