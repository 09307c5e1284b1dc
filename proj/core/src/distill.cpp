#include "curvecast/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "curvecast/rng.hpp"

namespace curvecast::distill {

namespace {

// Regularized incomplete beta function, continued-fraction form.
double beta_cf(double a, double b, double x) {
  const int max_iter = 300;
  const double eps = 3e-14, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

double inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  double front = std::exp(lbeta + a * std::log(x) + b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

std::vector<double> average_ranks(const RankMatrix& rm,
                                  const std::vector<std::size_t>& subset) {
  std::vector<double> avg(rm.n_methods(), 0.0);
  for (auto d : subset)
    for (std::size_t m = 0; m < rm.n_methods(); ++m) avg[m] += rm.rows[d][m];
  for (double& v : avg) v /= static_cast<double>(subset.size());
  return avg;
}

double mae_between(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

std::size_t dataset_index(const RankMatrix& rm, const std::string& id) {
  for (std::size_t i = 0; i < rm.n_datasets(); ++i)
    if (rm.datasets[i] == id) return i;
  throw Error("subset dataset '" + id + "' not in rank matrix");
}

}  // namespace

Strategy strategy_from_string(const std::string& s) {
  if (s == "greedy") return Strategy::greedy;
  if (s == "random") return Strategy::random;
  if (s == "kmeans") return Strategy::kmeans;
  throw Error("unknown strategy: " + s);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::greedy: return "greedy";
    case Strategy::random: return "random";
    case Strategy::kmeans: return "kmeans";
  }
  return "?";
}

std::string to_string(Friendliness f) {
  switch (f) {
    case Friendliness::TF: return "TF";
    case Friendliness::DF: return "DF";
    case Friendliness::Tie: return "Tie";
  }
  return "?";
}

RankMatrix rank(const ResultsTable& results) {
  RankMatrix rm;
  rm.methods = results.methods;
  rm.datasets = results.datasets;
  const std::size_t L = results.n_methods();
  for (std::size_t d = 0; d < results.n_datasets(); ++d) {
    const auto& vals = results.values[d];
    bool hib = results.higher_is_better[d];
    std::vector<std::size_t> order(L);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (vals[a] != vals[b]) return hib ? vals[a] > vals[b] : vals[a] < vals[b];
      return a < b;
    });
    std::vector<double> row(L);
    std::size_t i = 0;
    while (i < L) {
      std::size_t j = i;
      while (j + 1 < L && vals[order[j + 1]] == vals[order[i]]) ++j;
      double avg_pos = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t k = i; k <= j; ++k) row[order[k]] = avg_pos;
      i = j + 1;
    }
    rm.rows.push_back(std::move(row));
  }
  return rm;
}

double rank_mae(const RankMatrix& full, const std::set<std::string>& subset_ids) {
  if (subset_ids.empty()) throw Error("rank_mae: empty subset");
  std::vector<std::size_t> sub;
  for (const auto& id : subset_ids) sub.push_back(dataset_index(full, id));
  std::vector<std::size_t> all(full.n_datasets());
  std::iota(all.begin(), all.end(), 0);
  return mae_between(average_ranks(full, all), average_ranks(full, sub));
}

SubsetSelection select_greedy(const RankMatrix& full, std::size_t quota) {
  const std::size_t D = full.n_datasets();
  if (quota < 1 || quota > D) throw Error("greedy quota out of range");
  std::vector<std::size_t> all(D);
  std::iota(all.begin(), all.end(), 0);
  auto full_avg = average_ranks(full, all);
  const std::size_t L = full.n_methods();

  std::vector<bool> chosen(D, false);
  std::vector<double> sum(L, 0.0);
  std::vector<std::size_t> picked;
  for (std::size_t step = 0; step < quota; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_d = D;
    for (std::size_t d = 0; d < D; ++d) {
      if (chosen[d]) continue;
      double mae = 0.0;
      double inv = 1.0 / static_cast<double>(step + 1);
      for (std::size_t m = 0; m < L; ++m)
        mae += std::fabs(full_avg[m] - (sum[m] + full.rows[d][m]) * inv);
      mae /= static_cast<double>(L);
      if (mae < best) {
        best = mae;
        best_d = d;
      }
    }
    chosen[best_d] = true;
    picked.push_back(best_d);
    for (std::size_t m = 0; m < L; ++m) sum[m] += full.rows[best_d][m];
  }
  std::sort(picked.begin(), picked.end());

  SubsetSelection sel;
  sel.strategy = Strategy::greedy;
  for (auto d : picked) sel.chosen.push_back(full.datasets[d]);
  sel.rank_mae = rank_mae(full, {sel.chosen.begin(), sel.chosen.end()});
  return sel;
}

namespace {

struct Trial {
  double mae = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  std::vector<std::size_t> subset;
};

std::vector<std::size_t> draw_without_replacement(
    const std::vector<std::size_t>& pool, std::size_t count, rng::Stream& rs) {
  std::vector<std::size_t> v(pool);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = static_cast<std::size_t>(rs.uniform_int(i, v.size() - 1));
    std::swap(v[i], v[j]);
  }
  v.resize(count);
  return v;
}

}  // namespace

SubsetSelection select_random(const RankMatrix& full, std::size_t quota,
                              std::size_t trials, std::uint64_t seed,
                              std::size_t workers,
                              const std::map<std::string, std::string>* groups,
                              const std::map<std::string, std::size_t>* group_quota) {
  if (trials < 1) throw Error("select_random needs trials >= 1");
  const std::size_t D = full.n_datasets();
  std::vector<std::size_t> all(D);
  std::iota(all.begin(), all.end(), 0);
  auto full_avg = average_ranks(full, all);
  const std::size_t L = full.n_methods();

  // Candidate pools: one global pool, or one per group.
  std::vector<std::pair<std::vector<std::size_t>, std::size_t>> pools;
  if (groups && group_quota) {
    std::map<std::string, std::vector<std::size_t>> by_group;
    for (std::size_t d = 0; d < D; ++d) {
      auto it = groups->find(full.datasets[d]);
      if (it == groups->end())
        throw Error("dataset " + full.datasets[d] + " has no group assignment");
      by_group[it->second].push_back(d);
    }
    for (const auto& [name, q] : *group_quota) {
      auto it = by_group.find(name);
      std::size_t avail = it == by_group.end() ? 0 : it->second.size();
      if (q > avail)
        throw Error("quota " + std::to_string(q) + " exceeds availability " +
                    std::to_string(avail) + " for group " + name);
      if (q > 0) pools.emplace_back(it->second, q);
    }
  } else {
    if (quota < 1 || quota > D) throw Error("random quota out of range");
    pools.emplace_back(all, quota);
  }

  auto run_trial = [&](std::size_t i) {
    rng::Stream rs(seed, "trial/" + std::to_string(i));
    Trial t;
    t.index = i;
    for (const auto& [pool, q] : pools) {
      auto part = draw_without_replacement(pool, q, rs);
      t.subset.insert(t.subset.end(), part.begin(), part.end());
    }
    auto avg = average_ranks(full, t.subset);
    t.mae = mae_between(full_avg, avg);
    return t;
  };

  workers = std::max<std::size_t>(workers, 1);
  std::vector<Trial> best_per_worker(workers);
  auto work = [&](std::size_t w) {
    Trial best;
    best.index = trials;  // sentinel
    for (std::size_t i = w; i < trials; i += workers) {
      Trial t = run_trial(i);
      if (t.mae < best.mae || (t.mae == best.mae && t.index < best.index))
        best = std::move(t);
    }
    best_per_worker[w] = std::move(best);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& th : threads) th.join();
  }
  Trial best;
  best.index = trials;
  for (auto& t : best_per_worker)
    if (t.mae < best.mae || (t.mae == best.mae && t.index < best.index))
      best = std::move(t);

  std::sort(best.subset.begin(), best.subset.end());
  SubsetSelection sel;
  sel.strategy = Strategy::random;
  sel.seed = seed;
  sel.trials = trials;
  for (auto d : best.subset) sel.chosen.push_back(full.datasets[d]);
  sel.rank_mae = rank_mae(full, {sel.chosen.begin(), sel.chosen.end()});
  return sel;
}

SubsetSelection select_kmeans(const RankMatrix& full, std::size_t quota,
                              std::uint64_t seed) {
  const std::size_t D = full.n_datasets();
  const std::size_t L = full.n_methods();
  if (quota < 1 || quota > D) throw Error("kmeans quota out of range");

  auto dist2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < L; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
  };

  rng::Stream rs(seed, "kmeans");
  // k-means++ seeding.
  std::vector<std::vector<double>> centers;
  centers.push_back(full.rows[rs.uniform_int(0, D - 1)]);
  std::vector<double> min_d2(D);
  while (centers.size() < quota) {
    double total = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) m = std::min(m, dist2(full.rows[d], c));
      min_d2[d] = m;
      total += m;
    }
    std::size_t pick;
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(rs.uniform_int(0, D - 1));
    } else {
      double r = rs.uniform() * total;
      pick = D - 1;
      double acc = 0.0;
      for (std::size_t d = 0; d < D; ++d) {
        acc += min_d2[d];
        if (r < acc) {
          pick = d;
          break;
        }
      }
    }
    centers.push_back(full.rows[pick]);
  }

  std::vector<std::size_t> assign(D, 0);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (std::size_t d = 0; d < D; ++d) {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        double v = dist2(full.rows[d], centers[c]);
        if (v < bd) {
          bd = v;
          best = c;
        }
      }
      if (assign[d] != best) {
        assign[d] = best;
        changed = true;
      }
    }
    // Recompute centers; empty clusters are re-seeded at the point farthest
    // from its current center.
    std::vector<std::vector<double>> next(centers.size(), std::vector<double>(L, 0.0));
    std::vector<std::size_t> counts(centers.size(), 0);
    for (std::size_t d = 0; d < D; ++d) {
      ++counts[assign[d]];
      for (std::size_t m = 0; m < L; ++m) next[assign[d]][m] += full.rows[d][m];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (counts[c] == 0) {
        std::size_t far = 0;
        double fd = -1.0;
        for (std::size_t d = 0; d < D; ++d) {
          double v = dist2(full.rows[d], centers[assign[d]]);
          if (v > fd) {
            fd = v;
            far = d;
          }
        }
        next[c] = full.rows[far];
        changed = true;
      } else {
        for (std::size_t m = 0; m < L; ++m)
          next[c][m] /= static_cast<double>(counts[c]);
      }
    }
    centers = std::move(next);
    if (!changed) break;
  }

  // Representatives: nearest dataset per center, without repeats.
  std::vector<bool> taken(D, false);
  std::vector<std::size_t> reps;
  for (const auto& c : centers) {
    std::size_t best = D;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < D; ++d) {
      if (taken[d]) continue;
      double v = dist2(full.rows[d], c);
      if (v < bd) {
        bd = v;
        best = d;
      }
    }
    taken[best] = true;
    reps.push_back(best);
  }
  std::sort(reps.begin(), reps.end());

  SubsetSelection sel;
  sel.strategy = Strategy::kmeans;
  sel.seed = seed;
  for (auto d : reps) sel.chosen.push_back(full.datasets[d]);
  sel.rank_mae = rank_mae(full, {sel.chosen.begin(), sel.chosen.end()});
  return sel;
}

std::vector<TreeDnnScore> tree_dnn_score(const ResultsTable& results,
                                         const std::set<std::string>& tree_methods,
                                         const std::set<std::string>& dnn_methods,
                                         double tau) {
  if (tree_methods.empty() || dnn_methods.empty())
    throw Error("tree_dnn_score: method sets must be non-empty");
  for (const auto& m : tree_methods)
    if (dnn_methods.count(m))
      throw Error("tree_dnn_score: method sets must be disjoint (" + m + ")");
  std::vector<std::size_t> tree_idx, dnn_idx;
  for (const auto& m : tree_methods) tree_idx.push_back(results.method_index(m));
  for (const auto& m : dnn_methods) dnn_idx.push_back(results.method_index(m));

  std::vector<TreeDnnScore> out;
  for (std::size_t d = 0; d < results.n_datasets(); ++d) {
    double flip = results.higher_is_better[d] ? 1.0 : -1.0;
    std::vector<double> tv, dv;
    for (auto i : tree_idx) tv.push_back(flip * results.values[d][i]);
    for (auto i : dnn_idx) dv.push_back(flip * results.values[d][i]);
    double lo = std::min(*std::min_element(tv.begin(), tv.end()),
                         *std::min_element(dv.begin(), dv.end()));
    double hi = std::max(*std::max_element(tv.begin(), tv.end()),
                         *std::max_element(dv.begin(), dv.end()));
    double s;
    if (hi - lo <= 0.0) {
      s = 0.0;  // zero range: all normalized to 0.5
    } else {
      auto norm_max = [&](const std::vector<double>& v) {
        double best = -1.0;
        for (double x : v) best = std::max(best, (x - lo) / (hi - lo));
        return best;
      };
      s = norm_max(tv) - norm_max(dv);
    }
    TreeDnnScore score;
    score.dataset_id = results.datasets[d];
    score.score = s;
    score.label = s > tau    ? Friendliness::TF
                  : s < -tau ? Friendliness::DF
                             : Friendliness::Tie;
    out.push_back(std::move(score));
  }
  return out;
}

SubsetSelection group_and_pick(const std::vector<TreeDnnScore>& scores,
                               const std::vector<DatasetInfo>& info,
                               const GroupPickConfig& config) {
  std::map<std::string, double> score_of;
  std::map<std::string, std::size_t> input_pos;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    score_of[scores[i].dataset_id] = scores[i].score;
    input_pos[scores[i].dataset_id] = i;
  }
  for (const auto& d : info)
    if (!score_of.count(d.dataset_id))
      throw Error("no score for dataset " + d.dataset_id);

  std::size_t cat_count = 0, num_count = 0;
  std::vector<std::string> chosen_ids;

  std::map<Task, std::vector<const DatasetInfo*>> by_task;
  for (const auto& d : info) by_task[d.task].push_back(&d);

  for (auto& [task, list] : by_task) {
    auto git = config.groups.find(task);
    if (git == config.groups.end() || git->second == 0) continue;
    std::size_t n_groups = git->second;

    // Sort by size N x d; ties keep input order.
    std::stable_sort(list.begin(), list.end(),
                     [](const DatasetInfo* a, const DatasetInfo* b) {
                       return a->size_nd < b->size_nd;
                     });

    // Contiguous groups; remainder spread to the earliest groups.
    std::size_t base = list.size() / n_groups, rem = list.size() % n_groups;
    std::size_t pos = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
      std::size_t count = base + (g < rem ? 1 : 0);
      if (count < 3)
        throw Error("group " + std::to_string(g) + " for task " +
                    curvecast::to_string(task) + " has fewer than 3 datasets");
      std::vector<const DatasetInfo*> group(list.begin() + static_cast<long>(pos),
                                            list.begin() + static_cast<long>(pos + count));
      pos += count;

      std::set<std::string> in_group_chosen;
      auto pick_role = [&](auto better) {
        // Rank candidates for this role; ties break by input order.
        std::vector<const DatasetInfo*> ranked(group);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [&](const DatasetInfo* a, const DatasetInfo* b) {
                           double sa = score_of[a->dataset_id];
                           double sb = score_of[b->dataset_id];
                           if (sa != sb) return better(sa, sb);
                           return input_pos[a->dataset_id] < input_pos[b->dataset_id];
                         });
        std::vector<const DatasetInfo*> avail;
        for (auto* d : ranked)
          if (!in_group_chosen.count(d->dataset_id)) avail.push_back(d);
        const DatasetInfo* pick = avail[0];
        if (config.balance_categorical && avail.size() > 1) {
          long cat = static_cast<long>(cat_count) + (pick->has_categorical ? 1 : 0);
          long num = static_cast<long>(num_count) + (pick->has_categorical ? 0 : 1);
          if (std::labs(cat - num) > 1) pick = avail[1];
        }
        in_group_chosen.insert(pick->dataset_id);
        chosen_ids.push_back(pick->dataset_id);
        if (pick->has_categorical)
          ++cat_count;
        else
          ++num_count;
      };
      pick_role([](double a, double b) { return a > b; });  // TF: max score
      pick_role([](double a, double b) { return a < b; });  // DF: min score
      pick_role([](double a, double b) {                    // Tie: min |score|
        return std::fabs(a) < std::fabs(b);
      });
    }
  }

  SubsetSelection sel;
  sel.strategy = Strategy::greedy;  // deterministic role-based pick
  std::sort(chosen_ids.begin(), chosen_ids.end(),
            [&](const std::string& a, const std::string& b) {
              return input_pos[a] < input_pos[b];
            });
  sel.chosen = std::move(chosen_ids);
  return sel;
}

double welch_p_value(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw Error("welch_p_value needs at least 2 samples per side");
  auto mean_var = [](const std::vector<double>& v) {
    double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair<double, double>{m, ss / static_cast<double>(v.size() - 1)};
  };
  auto [m1, v1] = mean_var(a);
  auto [m2, v2] = mean_var(b);
  double se1 = v1 / static_cast<double>(a.size());
  double se2 = v2 / static_cast<double>(b.size());
  if (se1 + se2 <= 0.0) return m1 == m2 ? 1.0 : 0.0;
  double t = (m1 - m2) / std::sqrt(se1 + se2);
  double df = (se1 + se2) * (se1 + se2) /
              (se1 * se1 / static_cast<double>(a.size() - 1) +
               se2 * se2 / static_cast<double>(b.size() - 1));
  // Two-sided p from the t CDF via the regularized incomplete beta.
  return inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

std::vector<WinTieLose> pairwise_significance(const ResultsTable& results,
                                              const std::string& anchor,
                                              double alpha) {
  if (!results.has_seeds())
    throw Error("pairwise_significance requires seed-level results");
  std::size_t ai = results.method_index(anchor);
  std::vector<WinTieLose> out;
  for (std::size_t m = 0; m < results.n_methods(); ++m) {
    if (m == ai) continue;
    WinTieLose wtl;
    wtl.opponent = results.methods[m];
    std::size_t wins = 0, ties = 0, losses = 0;
    for (std::size_t d = 0; d < results.n_datasets(); ++d) {
      const auto& sa = results.seeds[d][ai];
      const auto& sb = results.seeds[d][m];
      double p = welch_p_value(sa, sb);
      if (p > alpha) {
        ++ties;
        continue;
      }
      double ma = std::accumulate(sa.begin(), sa.end(), 0.0) / static_cast<double>(sa.size());
      double mb = std::accumulate(sb.begin(), sb.end(), 0.0) / static_cast<double>(sb.size());
      if (ma == mb) {
        ++ties;
        continue;
      }
      bool anchor_better = results.higher_is_better[d] ? ma > mb : ma < mb;
      if (anchor_better)
        ++wins;
      else
        ++losses;
    }
    double n = static_cast<double>(results.n_datasets());
    wtl.win = static_cast<double>(wins) / n;
    wtl.tie = static_cast<double>(ties) / n;
    wtl.lose = static_cast<double>(losses) / n;
    out.push_back(std::move(wtl));
  }
  return out;
}

}  // namespace curvecast::distill
