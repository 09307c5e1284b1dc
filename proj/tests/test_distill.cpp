#include <doctest.h>

#include <cmath>
#include <set>

#include "curvecast/distill.hpp"
#include "curvecast/rng.hpp"

using namespace curvecast;

namespace {

ResultsTable table_from(std::vector<std::string> methods,
                        std::vector<std::vector<double>> values,
                        bool higher_is_better = true) {
  ResultsTable t;
  t.methods = std::move(methods);
  t.values = std::move(values);
  for (std::size_t d = 0; d < t.values.size(); ++d) {
    t.datasets.push_back("d" + std::to_string(d));
    t.higher_is_better.push_back(higher_is_better);
  }
  return t;
}

ResultsTable random_table(std::size_t n_datasets, std::size_t n_methods,
                          std::uint64_t seed) {
  rng::Stream rs(seed, "distill-test");
  std::vector<std::vector<double>> values(n_datasets,
                                          std::vector<double>(n_methods));
  for (auto& row : values)
    for (double& v : row) v = rs.uniform();
  std::vector<std::string> methods;
  for (std::size_t m = 0; m < n_methods; ++m)
    methods.push_back("m" + std::to_string(m));
  return table_from(std::move(methods), std::move(values));
}

}  // namespace

TEST_CASE("ranks average ties and rows sum to L(L+1)/2") {
  // higher_is_better: best value gets rank 1.
  auto t = table_from({"a", "b", "c", "d"}, {{0.9, 0.7, 0.7, 0.5}});
  auto rm = distill::rank(t);
  REQUIRE(rm.rows.size() == 1);
  CHECK(rm.rows[0] == std::vector<double>{1.0, 2.5, 2.5, 4.0});

  // Lower-is-better rows rank in the opposite direction.
  auto t2 = table_from({"a", "b", "c", "d"}, {{0.9, 0.7, 0.7, 0.5}}, false);
  CHECK(distill::rank(t2).rows[0] == std::vector<double>{4.0, 2.5, 2.5, 1.0});

  for (std::uint64_t s = 0; s < 5; ++s) {
    auto rm2 = distill::rank(random_table(7, 6, s));
    for (const auto& row : rm2.rows) {
      double sum = 0;
      for (double r : row) sum += r;
      CHECK(sum == 21.0);  // 6*7/2 exactly
    }
  }
}

TEST_CASE("rank_mae is zero for the full subset and matches a hand case") {
  auto rm = distill::rank(random_table(8, 4, 1));
  std::set<std::string> all(rm.datasets.begin(), rm.datasets.end());
  CHECK(distill::rank_mae(rm, all) == 0.0);

  // Hand case: two datasets with opposite orderings, subset = first only.
  auto t = table_from({"a", "b"}, {{0.9, 0.1}, {0.1, 0.9}});
  auto r = distill::rank(t);
  // Full averages: a=1.5, b=1.5; subset {d0}: a=1, b=2 -> MAE = 0.5.
  CHECK(distill::rank_mae(r, {"d0"}) == doctest::Approx(0.5));
}

TEST_CASE("greedy selection is within the reported MAE and deterministic") {
  auto rm = distill::rank(random_table(12, 5, 2));
  auto sel = distill::select_greedy(rm, 4);
  CHECK(sel.chosen.size() == 4);
  std::set<std::string> chosen(sel.chosen.begin(), sel.chosen.end());
  CHECK(chosen.size() == 4);
  CHECK(sel.rank_mae ==
        doctest::Approx(distill::rank_mae(rm, chosen)).epsilon(1e-12));
  auto again = distill::select_greedy(rm, 4);
  CHECK(again.chosen == sel.chosen);
}

TEST_CASE("random selection is reproducible and worker-independent") {
  auto rm = distill::rank(random_table(15, 6, 3));
  auto one = distill::select_random(rm, 4, 300, 9, 1);
  auto four = distill::select_random(rm, 4, 300, 9, 4);
  CHECK(one.chosen == four.chosen);
  CHECK(one.rank_mae == four.rank_mae);
  std::set<std::string> chosen(one.chosen.begin(), one.chosen.end());
  CHECK(one.rank_mae ==
        doctest::Approx(distill::rank_mae(rm, chosen)).epsilon(1e-12));

  // More trials can only improve (or tie) the objective.
  auto more = distill::select_random(rm, 4, 3000, 9, 2);
  CHECK(more.rank_mae <= one.rank_mae + 1e-12);
}

TEST_CASE("random selection honours per-group quotas") {
  auto rm = distill::rank(random_table(10, 4, 4));
  std::map<std::string, std::string> groups;
  for (std::size_t i = 0; i < 10; ++i)
    groups["d" + std::to_string(i)] = i < 5 ? "lo" : "hi";
  std::map<std::string, std::size_t> quota = {{"lo", 1}, {"hi", 2}};
  auto sel = distill::select_random(rm, 3, 200, 1, 1, &groups, &quota);
  REQUIRE(sel.chosen.size() == 3);
  std::size_t lo = 0, hi = 0;
  for (const auto& id : sel.chosen) (groups[id] == "lo" ? lo : hi)++;
  CHECK(lo == 1);
  CHECK(hi == 2);
}

TEST_CASE("kmeans selection returns distinct representatives") {
  auto rm = distill::rank(random_table(20, 5, 5));
  auto sel = distill::select_kmeans(rm, 6, 7);
  CHECK(sel.chosen.size() == 6);
  std::set<std::string> chosen(sel.chosen.begin(), sel.chosen.end());
  CHECK(chosen.size() == 6);
  CHECK(sel.rank_mae ==
        doctest::Approx(distill::rank_mae(rm, chosen)).epsilon(1e-12));
  auto again = distill::select_kmeans(rm, 6, 7);
  CHECK(again.chosen == sel.chosen);
}

TEST_CASE("tree-dnn score matches the hand example") {
  auto t = table_from({"xgb", "rf", "cat", "mlp", "resnet", "ftt"},
                      {{0.9, 0.8, 0.7, 0.6, 0.5, 0.4}});
  auto scores = distill::tree_dnn_score(t, {"xgb", "rf", "cat"},
                                        {"mlp", "resnet", "ftt"}, 0.05);
  REQUIRE(scores.size() == 1);
  CHECK(scores[0].score == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(scores[0].label == distill::Friendliness::TF);

  // Affine transform of all six values leaves the normalized score alone.
  auto t2 = table_from({"xgb", "rf", "cat", "mlp", "resnet", "ftt"},
                       {{0.9 * 2 + 3, 0.8 * 2 + 3, 0.7 * 2 + 3, 0.6 * 2 + 3,
                         0.5 * 2 + 3, 0.4 * 2 + 3}});
  auto scores2 = distill::tree_dnn_score(t2, {"xgb", "rf", "cat"},
                                         {"mlp", "resnet", "ftt"}, 0.05);
  CHECK(scores2[0].score == doctest::Approx(scores[0].score).epsilon(1e-12));

  // Identical values across the six methods: zero range -> Tie with s = 0.
  auto flat = table_from({"xgb", "rf", "cat", "mlp", "resnet", "ftt"},
                         {{0.5, 0.5, 0.5, 0.5, 0.5, 0.5}});
  auto s3 = distill::tree_dnn_score(flat, {"xgb", "rf", "cat"},
                                    {"mlp", "resnet", "ftt"}, 0.05);
  CHECK(s3[0].score == 0.0);
  CHECK(s3[0].label == distill::Friendliness::Tie);
}

TEST_CASE("rmse rows are negated before normalization") {
  // Lower-is-better: the best (lowest) raw value must normalize to 1.
  auto t = table_from({"xgb", "mlp"}, {{1.0, 2.0}}, false);
  auto scores = distill::tree_dnn_score(t, {"xgb"}, {"mlp"}, 0.05);
  CHECK(scores[0].score == doctest::Approx(1.0));
  CHECK(scores[0].label == distill::Friendliness::TF);
}

TEST_CASE("group_and_pick selects three roles per group without repeats") {
  std::vector<distill::TreeDnnScore> scores;
  std::vector<distill::DatasetInfo> info;
  for (int i = 0; i < 9; ++i) {
    distill::TreeDnnScore s;
    s.dataset_id = "d" + std::to_string(i);
    s.score = (i % 3 == 0) ? 0.5 : (i % 3 == 1 ? -0.5 : 0.01);
    scores.push_back(s);
    info.push_back({s.dataset_id, Task::binclass, double(100 * (i + 1)), false});
  }
  distill::GroupPickConfig cfg;
  cfg.groups = {{Task::binclass, 3}, {Task::multiclass, 4}, {Task::regression, 6}};
  auto sel = distill::group_and_pick(scores, info, cfg);
  CHECK(sel.chosen.size() == 9);  // 3 groups x 3 roles
  std::set<std::string> uniq(sel.chosen.begin(), sel.chosen.end());
  CHECK(uniq.size() == 9);
}

TEST_CASE("welch p-values match reference values") {
  CHECK(distill::welch_p_value({1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}) ==
        doctest::Approx(0.34659350708733416).epsilon(1e-8));
  CHECK(distill::welch_p_value({0.1, 0.2, 0.15, 0.3, 0.25, 0.18},
                               {0.4, 0.38, 0.45, 0.5, 0.41, 0.39}) ==
        doctest::Approx(0.00014034125663680406).epsilon(1e-6));
  // Symmetry and range.
  CHECK(distill::welch_p_value({2, 3, 4, 5, 6}, {1, 2, 3, 4, 5}) ==
        doctest::Approx(0.34659350708733416).epsilon(1e-8));
  // Zero variance on both sides: equal means are a certain tie, different
  // means a certain difference.
  CHECK(distill::welch_p_value({1, 1, 1}, {1, 1, 1}) == 1.0);
  CHECK(distill::welch_p_value({1, 1, 1}, {2, 2, 2}) == 0.0);
}

TEST_CASE("pairwise significance classifies win/tie/lose per dataset") {
  ResultsTable t;
  t.methods = {"anchor", "worse", "same"};
  t.datasets = {"d0", "d1"};
  t.higher_is_better = {true, false};
  t.seeds.resize(2, std::vector<std::vector<double>>(3));
  rng::Stream rs(17, "wtl");
  auto fill = [&](std::size_t d, std::size_t m, double mean) {
    double sum = 0;
    for (int s = 0; s < 15; ++s) {
      double v = mean + 0.01 * rs.normal();
      t.seeds[d][m].push_back(v);
      sum += v;
    }
    return sum / 15;
  };
  t.values = {{fill(0, 0, 0.9), fill(0, 1, 0.5), fill(0, 2, 0.9)},
              {fill(1, 0, 1.0), fill(1, 1, 2.0), fill(1, 2, 1.0)}};

  auto rates = distill::pairwise_significance(t, "anchor", 0.05);
  REQUIRE(rates.size() == 2);
  CHECK(rates[0].opponent == "worse");
  CHECK(rates[0].win == 1.0);  // anchor beats on both datasets (direction-aware)
  CHECK(rates[0].lose == 0.0);
  CHECK(rates[1].opponent == "same");
  CHECK(rates[1].tie == 1.0);

  ResultsTable no_seeds = table_from({"a", "b"}, {{0.5, 0.6}});
  CHECK_THROWS_AS(static_cast<void>(distill::pairwise_significance(no_seeds, "a", 0.05)),
                  Error);
}

TEST_CASE("strategy names round-trip") {
  for (const char* n : {"greedy", "random", "kmeans"})
    CHECK(distill::to_string(distill::strategy_from_string(n)) == n);
  CHECK_THROWS_AS(distill::strategy_from_string("best"), Error);
}
