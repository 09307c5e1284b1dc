#include "curvecast/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curvecast/error.hpp"

namespace curvecast::cart {

namespace {

double sum_of(const std::vector<double>& y, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (auto i : idx) s += y[i];
  return s;
}

double sse_of(const std::vector<double>& y, const std::vector<std::size_t>& idx) {
  double m = sum_of(y, idx) / static_cast<double>(idx.size());
  double s = 0.0;
  for (auto i : idx) s += (y[i] - m) * (y[i] - m);
  return s;
}

}  // namespace

void RegressionTree::fit(const std::vector<std::vector<double>>& X,
                         const std::vector<double>& y,
                         const TreeConfig& config) {
  if (X.empty() || X.size() != y.size())
    throw Error("RegressionTree: empty input or X/y size mismatch");
  nodes_.clear();
  importances_.assign(X[0].size(), 0.0);
  std::vector<std::size_t> idx(X.size());
  std::iota(idx.begin(), idx.end(), 0);
  build(X, y, idx, 0, config);
  double total = std::accumulate(importances_.begin(), importances_.end(), 0.0);
  if (total > 0.0)
    for (double& v : importances_) v /= total;
}

int RegressionTree::build(const std::vector<std::vector<double>>& X,
                          const std::vector<double>& y,
                          std::vector<std::size_t>& idx, std::size_t depth,
                          const TreeConfig& config) {
  int node_id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  double mean = sum_of(y, idx) / static_cast<double>(idx.size());
  nodes_[node_id].value = mean;

  if (depth >= config.max_depth || idx.size() < 2 * config.min_leaf)
    return node_id;

  double parent_sse = sse_of(y, idx);
  if (parent_sse <= 0.0) return node_id;

  int best_feature = -1;
  double best_threshold = 0.0, best_gain = 0.0;

  const std::size_t dims = X[0].size();
  std::vector<std::size_t> order(idx);
  for (std::size_t f = 0; f < dims; ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (X[a][f] != X[b][f]) return X[a][f] < X[b][f];
      return a < b;
    });
    // Prefix sums over the sorted order for O(1) split evaluation.
    double lsum = 0.0, lsq = 0.0;
    double tsum = 0.0, tsq = 0.0;
    for (auto i : order) {
      tsum += y[i];
      tsq += y[i] * y[i];
    }
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      double yi = y[order[k]];
      lsum += yi;
      lsq += yi * yi;
      double xl = X[order[k]][f], xr = X[order[k + 1]][f];
      if (xl == xr) continue;
      std::size_t nl = k + 1, nr = order.size() - nl;
      if (nl < config.min_leaf || nr < config.min_leaf) continue;
      double rsum = tsum - lsum, rsq = tsq - lsq;
      double sse_l = lsq - lsum * lsum / static_cast<double>(nl);
      double sse_r = rsq - rsum * rsum / static_cast<double>(nr);
      double gain = parent_sse - sse_l - sse_r;
      if (gain > best_gain + 1e-15) {
        best_gain = gain;
        best_feature = static_cast<int>(f);
        best_threshold = 0.5 * (xl + xr);
      }
    }
  }

  if (best_feature < 0) return node_id;

  importances_[static_cast<std::size_t>(best_feature)] += best_gain;

  std::vector<std::size_t> left, right;
  for (auto i : idx) {
    if (X[i][static_cast<std::size_t>(best_feature)] <= best_threshold)
      left.push_back(i);
    else
      right.push_back(i);
  }
  nodes_[node_id].feature = best_feature;
  nodes_[node_id].threshold = best_threshold;
  int l = build(X, y, left, depth + 1, config);
  int r = build(X, y, right, depth + 1, config);
  nodes_[node_id].left = l;
  nodes_[node_id].right = r;
  return node_id;
}

double RegressionTree::predict(const std::vector<double>& x) const {
  if (nodes_.empty()) throw Error("RegressionTree: not fitted");
  int cur = 0;
  while (nodes_[static_cast<std::size_t>(cur)].feature >= 0) {
    const auto& n = nodes_[static_cast<std::size_t>(cur)];
    cur = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[static_cast<std::size_t>(cur)].value;
}

}  // namespace curvecast::cart
