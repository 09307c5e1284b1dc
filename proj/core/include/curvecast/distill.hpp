#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "curvecast/types.hpp"

namespace curvecast::distill {

/// Per-dataset average ranks over methods. Each row is a permutation of
/// {1..L} adjusted for ties (tied values share the average of their
/// positions), so every row sums to L(L+1)/2 exactly.
struct RankMatrix {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> rows;  // D x L

  std::size_t n_methods() const { return methods.size(); }
  std::size_t n_datasets() const { return datasets.size(); }
};

enum class Strategy { greedy, random, kmeans };
Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

struct SubsetSelection {
  Strategy strategy = Strategy::greedy;
  std::vector<std::string> chosen;  // dataset IDs, in dataset order
  double rank_mae = 0.0;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
};

enum class Friendliness { TF, DF, Tie };
std::string to_string(Friendliness f);

struct TreeDnnScore {
  std::string dataset_id;
  double score = 0.0;
  Friendliness label = Friendliness::Tie;
};

RankMatrix rank(const ResultsTable& results);

/// Mean over methods of |average rank on the full benchmark - average rank
/// on the subset|.
double rank_mae(const RankMatrix& full, const std::set<std::string>& subset_ids);

SubsetSelection select_greedy(const RankMatrix& full, std::size_t quota);

/// Optional per-group quotas: `groups` maps dataset -> group name and
/// `group_quota` gives the draw count per group; when absent a single
/// uniform draw of `quota` datasets is used. Trial i draws from a stream
/// seeded by (seed, i), so results are independent of `workers`.
SubsetSelection select_random(
    const RankMatrix& full, std::size_t quota, std::size_t trials,
    std::uint64_t seed, std::size_t workers = 1,
    const std::map<std::string, std::string>* groups = nullptr,
    const std::map<std::string, std::size_t>* group_quota = nullptr);

/// KMeans (k-means++ seeding, Lloyd iterations, Euclidean distance) on the
/// per-dataset rank vectors; the representative of each cluster is the
/// dataset nearest its center. Empty clusters are re-seeded at the farthest
/// point from its center.
SubsetSelection select_kmeans(const RankMatrix& full, std::size_t quota,
                              std::uint64_t seed);

/// Tree-DNN friendliness score: min-max normalize the six selected methods'
/// metrics per dataset (RMSE negated first so higher is better), then
/// s = best tree-method value - best DNN-method value. Zero-range datasets
/// normalize to 0.5 everywhere (s = 0, Tie).
std::vector<TreeDnnScore> tree_dnn_score(const ResultsTable& results,
                                         const std::set<std::string>& tree_methods,
                                         const std::set<std::string>& dnn_methods,
                                         double tau);

struct DatasetInfo {
  std::string dataset_id;
  Task task = Task::binclass;
  double size_nd = 0.0;  // N x d
  bool has_categorical = false;
};

struct GroupPickConfig {
  /// Group counts per task type.
  std::map<Task, std::size_t> groups = {
      {Task::binclass, 5}, {Task::multiclass, 4}, {Task::regression, 6}};
  /// When set, a primary pick that pushes the categorical/numerical dataset
  /// count imbalance beyond 1 is replaced by the next-ranked candidate in
  /// the same role.
  bool balance_categorical = false;
};

/// Sort datasets per task type by N x d, partition into contiguous
/// equal-count groups (remainder spread to the earliest groups), and from
/// each group pick the max-score (TF), min-score (DF) and min-|score| (Tie)
/// datasets, in that order, without repeats.
SubsetSelection group_and_pick(const std::vector<TreeDnnScore>& scores,
                               const std::vector<DatasetInfo>& info,
                               const GroupPickConfig& config = {});

struct WinTieLose {
  std::string opponent;
  double win = 0.0, tie = 0.0, lose = 0.0;
};

/// Per-dataset Welch two-sample t-tests between the anchor's and each
/// opponent's seed-level results; p > alpha means tie, otherwise the winner
/// is decided by the means, respecting the metric direction.
std::vector<WinTieLose> pairwise_significance(const ResultsTable& results,
                                              const std::string& anchor,
                                              double alpha = 0.05);

/// Two-sided Welch t-test p-value.
double welch_p_value(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace curvecast::distill
