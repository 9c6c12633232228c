#include "contagion/netstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

void check_network(const Eigen::MatrixXd& x, double link_threshold) {
  if (x.rows() != x.cols() || x.rows() == 0)
    throw DimensionMismatch("network matrix must be square and non-empty");
  if (!x.allFinite()) throw ValidationError("network matrix contains non-finite entries");
  if ((x.array() < 0.0).any()) throw ValidationError("network matrix must be nonnegative");
  if ((x.diagonal().array() != 0.0).any())
    throw NonHollow("network matrix must have a zero diagonal");
  if (!(link_threshold >= 0.0)) throw ValidationError("link threshold must be nonnegative");
}

BoolMatrix binarize(const Eigen::MatrixXd& x, double threshold) {
  return (x.array() > threshold).matrix();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Tiering error of a core/periphery split: the core should be a clique, the
// periphery an independent set, and every core bank should both lend to and
// borrow from the periphery (when a periphery exists).
int tiering_error(const BoolMatrix& adj, const std::vector<char>& in_core) {
  const int n = static_cast<int>(adj.rows());
  int periphery_count = 0;
  for (int i = 0; i < n; ++i) periphery_count += !in_core[i];
  int err = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (in_core[i] && in_core[j]) err += !adj(i, j);
      if (!in_core[i] && !in_core[j]) err += adj(i, j);
    }
    if (in_core[i] && periphery_count > 0) {
      bool lends = false, borrows = false;
      for (int j = 0; j < n && !(lends && borrows); ++j) {
        if (in_core[j]) continue;
        lends = lends || adj(i, j);
        borrows = borrows || adj(j, i);
      }
      err += !lends;
      err += !borrows;
    }
  }
  return err;
}

}  // namespace

CorePeriphery core_periphery_fit(const Eigen::MatrixXd& x, double link_threshold) {
  check_network(x, link_threshold);
  const int n = static_cast<int>(x.rows());
  const BoolMatrix adj = binarize(x, link_threshold);

  CorePeriphery out;
  if (!adj.any()) return out;  // empty network: everyone periphery, score 0

  std::vector<int> degree(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && adj(i, j)) {
        ++degree[i];
        ++degree[j];
      }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return degree[a] > degree[b]; });

  std::vector<char> in_core(n, 0);
  for (int b : order) {
    in_core[b] = 1;
    const int with = tiering_error(adj, in_core);
    in_core[b] = 0;
    const int without = tiering_error(adj, in_core);
    if (with < without) in_core[b] = 1;
  }

  int current = tiering_error(adj, in_core);
  while (true) {
    int best_k = -1;
    int best_score = current;
    for (int k = 0; k < n; ++k) {
      in_core[k] = !in_core[k];
      const int s = tiering_error(adj, in_core);
      in_core[k] = !in_core[k];
      if (s < best_score) {
        best_score = s;
        best_k = k;
      }
    }
    if (best_k < 0) break;
    in_core[best_k] = !in_core[best_k];
    current = best_score;
  }

  for (int i = 0; i < n; ++i)
    if (in_core[i]) out.core.push_back(i);
  out.error = current;
  return out;
}

NetworkStats network_statistics(const Eigen::MatrixXd& x, double link_threshold) {
  check_network(x, link_threshold);
  const int n = static_cast<int>(x.rows());
  const BoolMatrix adj = binarize(x, link_threshold);

  NetworkStats s;
  std::vector<double> out_degree(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && adj(i, j)) {
        ++s.links;
        ++out_degree[i];
      }
  if (n > 1) s.density_pct = 100.0 * s.links / (static_cast<double>(n) * (n - 1));
  s.avg_degree = static_cast<double>(s.links) / n;
  s.med_degree = median(out_degree);

  // undirected view for assortativity and clustering
  std::vector<int> udeg(n, 0);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adj(i, j) || adj(j, i)) {
        edges.emplace_back(i, j);
        ++udeg[i];
        ++udeg[j];
      }

  if (!edges.empty()) {
    // Pearson correlation of end-point degrees over both orientations of
    // every undirected edge.
    double sum_x = 0.0, sum_xx = 0.0, sum_xy = 0.0;
    for (const auto& [u, v] : edges) {
      const double du = udeg[u], dv = udeg[v];
      sum_x += du + dv;
      sum_xx += du * du + dv * dv;
      sum_xy += 2.0 * du * dv;
    }
    const double m = 2.0 * static_cast<double>(edges.size());
    const double var = sum_xx / m - (sum_x / m) * (sum_x / m);
    if (var > 0.0) s.assortativity = (sum_xy / m - (sum_x / m) * (sum_x / m)) / var;
  }

  long long triangle_paths = 0;  // ordered closed 2-paths, 6 per triangle
  long long open_paths = 0;      // ordered 2-paths
  for (int i = 0; i < n; ++i) {
    open_paths += static_cast<long long>(udeg[i]) * (udeg[i] - 1);
    for (int j = 0; j < n; ++j) {
      if (j == i || !(adj(i, j) || adj(j, i))) continue;
      for (int k = 0; k < n; ++k)
        if (k != i && k != j && (adj(j, k) || adj(k, j)) && (adj(k, i) || adj(i, k)))
          ++triangle_paths;
    }
  }
  if (open_paths > 0)
    s.clustering_pct = 100.0 * static_cast<double>(triangle_paths) / static_cast<double>(open_paths);

  std::vector<double> hhi_rows, hhi_cols;
  double lender_sum = 0.0, borrower_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double rowsum = x.row(i).sum();
    if (rowsum > 0.0) {
      lender_sum += x.row(i).maxCoeff() / rowsum;
      hhi_rows.push_back((x.row(i) / rowsum).squaredNorm());
    }
    const double colsum = x.col(i).sum();
    if (colsum > 0.0) {
      borrower_sum += x.col(i).maxCoeff() / colsum;
      hhi_cols.push_back((x.col(i) / colsum).squaredNorm());
    }
  }
  if (!hhi_rows.empty()) {
    s.lender_dependency_pct = 100.0 * lender_sum / static_cast<double>(hhi_rows.size());
    s.hhi_assets_mean =
        std::accumulate(hhi_rows.begin(), hhi_rows.end(), 0.0) / static_cast<double>(hhi_rows.size());
    s.hhi_assets_median = median(hhi_rows);
  }
  if (!hhi_cols.empty()) {
    s.borrower_dependency_pct = 100.0 * borrower_sum / static_cast<double>(hhi_cols.size());
    s.hhi_liabilities_mean =
        std::accumulate(hhi_cols.begin(), hhi_cols.end(), 0.0) / static_cast<double>(hhi_cols.size());
    s.hhi_liabilities_median = median(hhi_cols);
  }

  if (s.links > 0) {
    const CorePeriphery cp = core_periphery_fit(x, link_threshold);
    s.core_size_pct = 100.0 * static_cast<double>(cp.core.size()) / n;
  }
  return s;
}

}  // namespace contagion
