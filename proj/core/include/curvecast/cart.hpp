#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace curvecast::cart {

struct TreeConfig {
  std::size_t max_depth = 8;
  std::size_t min_leaf = 5;
};

/// CART regression tree with variance-reduction splits. Fully deterministic:
/// candidate thresholds are midpoints between consecutive sorted distinct
/// values, scanned in (dimension, threshold) order.
class RegressionTree {
public:
  void fit(const std::vector<std::vector<double>>& X,
           const std::vector<double>& y, const TreeConfig& config = {});

  double predict(const std::vector<double>& x) const;

  /// Per-dimension total variance reduction, normalized to sum to 1
  /// (all zeros when no split was made).
  const std::vector<double>& importances() const { return importances_; }

private:
  struct Node {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    double value = 0.0;
    int left = -1, right = -1;
  };
  int build(const std::vector<std::vector<double>>& X,
            const std::vector<double>& y, std::vector<std::size_t>& idx,
            std::size_t depth, const TreeConfig& config);

  std::vector<Node> nodes_;
  std::vector<double> importances_;
};

}  // namespace curvecast::cart
