// Brute-force reference formulas for the meta-features, coded independently
// of the library (sorting-based counting instead of hash maps, direct
// definition-level arithmetic). Shared by the unit tests and the acceptance
// suite.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "curvecast/types.hpp"

namespace meta_oracle {

inline double mean_of(std::vector<double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

inline double sample_sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

// Linear-interpolation quantile, independently derived: with n sorted values
// the q-quantile sits at position q*(n-1).
inline double quantile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * double(v.size() - 1);
  auto i = std::size_t(pos);
  if (i + 1 == v.size()) return v[i];
  return v[i] * (1.0 - (pos - double(i))) + v[i + 1] * (pos - double(i));
}

// Equal-frequency bin codes: edge j is the (j/10)-quantile, a value's code is
// how many edges it strictly exceeds.
inline std::vector<int> bins_of(const std::vector<double>& v, int nbins = 10) {
  std::vector<int> codes(v.size(), 0);
  for (int j = 1; j < nbins; ++j) {
    double edge = quantile_of(v, double(j) / nbins);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] > edge) ++codes[i];
  }
  return codes;
}

// Shannon entropy in nats, counting by sorting.
inline double entropy_of(std::vector<int> codes) {
  std::sort(codes.begin(), codes.end());
  double h = 0, n = double(codes.size());
  std::size_t i = 0;
  while (i < codes.size()) {
    std::size_t j = i;
    while (j < codes.size() && codes[j] == codes[i]) ++j;
    double p = double(j - i) / n;
    h -= p * std::log(p);
    i = j;
  }
  return h;
}

inline double joint_entropy_of(const std::vector<int>& a,
                               const std::vector<int>& b) {
  // Encode pairs into a single code; codes are small non-negative ints.
  int bmax = 0;
  for (int x : b) bmax = std::max(bmax, x);
  std::vector<int> pair(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pair[i] = a[i] * (bmax + 1) + b[i];
  return entropy_of(pair);
}

// Goodman-Kruskal tau: (sum_ij p_ij^2/p_i - sum_j p_j^2) / (1 - sum_j p_j^2).
inline double concentration_of(const std::vector<int>& x,
                               const std::vector<int>& y) {
  int xm = 0, ym = 0;
  for (int v : x) xm = std::max(xm, v);
  for (int v : y) ym = std::max(ym, v);
  std::vector<std::vector<double>> table(std::size_t(xm) + 1,
                                         std::vector<double>(std::size_t(ym) + 1, 0.0));
  double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    table[std::size_t(x[i])][std::size_t(y[i])] += 1.0 / n;
  double innersum = 0, margsum = 0;
  for (std::size_t j = 0; j <= std::size_t(ym); ++j) {
    double pj = 0;
    for (std::size_t i = 0; i <= std::size_t(xm); ++i) pj += table[i][j];
    margsum += pj * pj;
  }
  for (std::size_t i = 0; i <= std::size_t(xm); ++i) {
    double pi = 0;
    for (std::size_t j = 0; j <= std::size_t(ym); ++j) pi += table[i][j];
    if (pi == 0) continue;
    for (std::size_t j = 0; j <= std::size_t(ym); ++j)
      innersum += table[i][j] * table[i][j] / pi;
  }
  if (1.0 - margsum <= 1e-12) return 0.0;
  return (innersum - margsum) / (1.0 - margsum);
}

struct Expected {
  double mean_mean, mean_sd;
  double range_mean, range_sd;
  double iqr_mean, iqr_sd;
  double sparsity_mean;
  double max_mean, max_sd;
  double attr_ent_mean, joint_ent_mean, mut_inf_mean, class_conc_mean;
  double cov_mean;
  double gravity;
  double ns_ratio;
  double nr_outliers;
  double imbalance_ratio;
};

inline Expected compute(const curvecast::DatasetSummary& ds) {
  using std::vector;
  std::size_t n = ds.n_instances, d = ds.n_features;

  vector<int> cls(n);
  if (ds.task == curvecast::Task::regression) {
    cls = bins_of(ds.labels);
  } else {
    for (std::size_t i = 0; i < n; ++i) cls[i] = int(ds.labels[i]);
  }
  double hy = entropy_of(cls);

  vector<double> colmeans, colranges, coliqrs, colsparsity, colmax;
  vector<double> hx, hxy, mi, tau;
  double n_outlier_attrs = 0;
  for (const auto& col : ds.columns) {
    vector<double> v = col.values;
    colmeans.push_back(mean_of(v));
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    colmax.push_back(hi);
    colranges.push_back(hi - lo);
    double q1 = quantile_of(v, 0.25), q3 = quantile_of(v, 0.75);
    coliqrs.push_back(q3 - q1);
    bool has_outlier = false;
    for (double x : v)
      if (x < q1 - 1.5 * (q3 - q1) || x > q3 + 1.5 * (q3 - q1)) has_outlier = true;
    if (has_outlier) n_outlier_attrs += 1;
    vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    double distinct = double(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    colsparsity.push_back(distinct / double(n));

    auto codes = bins_of(v);
    double ha = entropy_of(codes), hj = joint_entropy_of(codes, cls);
    hx.push_back(ha);
    hxy.push_back(hj);
    mi.push_back(std::max(0.0, ha + hy - hj));
    tau.push_back(concentration_of(codes, cls));
  }

  Expected e{};
  e.mean_mean = mean_of(colmeans);
  e.mean_sd = sample_sd_of(colmeans);
  e.range_mean = mean_of(colranges);
  e.range_sd = sample_sd_of(colranges);
  e.iqr_mean = mean_of(coliqrs);
  e.iqr_sd = sample_sd_of(coliqrs);
  e.sparsity_mean = mean_of(colsparsity);
  e.max_mean = mean_of(colmax);
  e.max_sd = sample_sd_of(colmax);
  e.attr_ent_mean = mean_of(hx);
  e.joint_ent_mean = mean_of(hxy);
  e.mut_inf_mean = mean_of(mi);
  e.class_conc_mean = mean_of(tau);
  e.nr_outliers = n_outlier_attrs;
  e.ns_ratio = e.mut_inf_mean > 1e-12
                   ? std::max(0.0, (e.attr_ent_mean - e.mut_inf_mean) / e.mut_inf_mean)
                   : 0.0;

  if (d >= 2) {
    vector<double> covs;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        const auto& a = ds.columns[i].values;
        const auto& b = ds.columns[j].values;
        double ma = mean_of(a), mb = mean_of(b), s = 0;
        for (std::size_t r = 0; r < n; ++r) s += (a[r] - ma) * (b[r] - mb);
        covs.push_back(std::fabs(s / double(n - 1)));
      }
    e.cov_mean = mean_of(covs);
  }

  // Minority/majority classes by count (smallest/largest code on ties, as the
  // counts are scanned in increasing code order).
  std::vector<std::size_t> counts;
  for (int c : cls) {
    if (counts.size() <= std::size_t(c)) counts.resize(std::size_t(c) + 1, 0);
    ++counts[std::size_t(c)];
  }
  std::size_t minc = n + 1, maxc = 0;
  int mincls = 0, maxcls = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    if (counts[c] < minc) { minc = counts[c]; mincls = int(c); }
    if (counts[c] > maxc) { maxc = counts[c]; maxcls = int(c); }
  }
  e.imbalance_ratio = double(minc) / double(maxc);

  std::size_t n_classes = 0;
  for (auto c : counts) n_classes += c > 0 ? 1 : 0;
  if (n_classes >= 2) {
    double dist2 = 0;
    for (const auto& col : ds.columns) {
      double m = mean_of(col.values), s = sample_sd_of(col.values);
      if (s <= 0) continue;
      double a = 0, b = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (cls[i] == mincls) a += (col.values[i] - m) / s / double(minc);
        if (cls[i] == maxcls) b += (col.values[i] - m) / s / double(maxc);
      }
      dist2 += (a - b) * (a - b);
    }
    e.gravity = std::sqrt(dist2);
  }
  return e;
}

}  // namespace meta_oracle
