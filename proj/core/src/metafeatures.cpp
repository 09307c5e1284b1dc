#include "curvecast/metafeatures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace curvecast::mf {

namespace {

constexpr double kEps = 1e-12;

double vec_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double vec_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = vec_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Agg aggregate(const std::vector<double>& per_attr) {
  if (per_attr.empty()) return {};
  return {vec_mean(per_attr), vec_sd(per_attr)};
}

/// Shannon entropy in nats from integer codes.
double entropy(const std::vector<int>& codes) {
  std::map<int, std::size_t> counts;
  for (int c : codes) ++counts[c];
  double n = static_cast<double>(codes.size());
  double h = 0.0;
  for (const auto& [c, k] : counts) {
    double p = static_cast<double>(k) / n;
    h -= p * std::log(p);
  }
  return h;
}

double joint_entropy(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, std::size_t> counts;
  for (std::size_t i = 0; i < a.size(); ++i) ++counts[{a[i], b[i]}];
  double n = static_cast<double>(a.size());
  double h = 0.0;
  for (const auto& [key, k] : counts) {
    double p = static_cast<double>(k) / n;
    h -= p * std::log(p);
  }
  return h;
}

/// Goodman-Kruskal tau of predicting y from x, via the contingency table.
double concentration(const std::vector<int>& x, const std::vector<int>& y) {
  std::map<std::pair<int, int>, std::size_t> joint;
  std::map<int, std::size_t> xmarg, ymarg;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++joint[{x[i], y[i]}];
    ++xmarg[x[i]];
    ++ymarg[y[i]];
  }
  double n = static_cast<double>(x.size());
  double isum = 0.0;
  for (const auto& [key, k] : joint) {
    double pij = static_cast<double>(k) / n;
    double pi = static_cast<double>(xmarg.at(key.first)) / n;
    isum += pij * pij / pi;
  }
  double msum = 0.0;
  for (const auto& [c, k] : ymarg) {
    double pj = static_cast<double>(k) / n;
    msum += pj * pj;
  }
  double denom = 1.0 - msum;
  if (denom <= kEps) return 0.0;
  return (isum - msum) / denom;
}

double sample_cov(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = vec_mean(a), mb = vec_mean(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size() - 1);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  double h = q * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<int> equal_frequency_bins(const std::vector<double>& values, int bins) {
  std::vector<double> edges;
  for (int i = 1; i < bins; ++i)
    edges.push_back(quantile(values, static_cast<double>(i) / bins));
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    int b = 0;
    for (double e : edges)
      if (values[i] > e) ++b;
    out[i] = b;
  }
  return out;
}

MetaFeatureVector extract(const DatasetSummary& ds) {
  ds.validate();
  const std::size_t n = ds.n_instances;
  const std::size_t d = ds.n_features;

  // Class codes: labels directly for classification, 10-bin equal-frequency
  // discretization of the target for regression.
  std::vector<int> cls(n);
  if (ds.task == Task::regression) {
    cls = equal_frequency_bins(ds.labels, 10);
  } else {
    for (std::size_t i = 0; i < n; ++i) cls[i] = static_cast<int>(ds.labels[i]);
  }
  double class_ent = entropy(cls);

  MetaFeatureVector out;
  out.nr_inst = static_cast<double>(n);
  out.nr_attr = static_cast<double>(d);
  out.inst_to_attr = static_cast<double>(n) / static_cast<double>(d);

  std::vector<double> means, ranges, iqrs, sparsities, maxes;
  std::vector<double> attr_ents, joint_ents, mut_infs, class_concs;
  std::size_t outlier_attrs = 0;

  for (const auto& col : ds.columns) {
    const auto& v = col.values;
    means.push_back(vec_mean(v));
    double vmax = *std::max_element(v.begin(), v.end());
    double vmin = *std::min_element(v.begin(), v.end());
    maxes.push_back(vmax);
    ranges.push_back(vmax - vmin);
    double q1 = quantile(v, 0.25), q3 = quantile(v, 0.75);
    iqrs.push_back(q3 - q1);
    double lo_fence = q1 - 1.5 * (q3 - q1), hi_fence = q3 + 1.5 * (q3 - q1);
    if (std::any_of(v.begin(), v.end(),
                    [&](double x) { return x < lo_fence || x > hi_fence; }))
      ++outlier_attrs;
    sparsities.push_back(
        static_cast<double>(std::set<double>(v.begin(), v.end()).size()) /
        static_cast<double>(n));

    auto b = equal_frequency_bins(v, 10);
    double ae = entropy(b);
    double je = joint_entropy(b, cls);
    attr_ents.push_back(ae);
    joint_ents.push_back(je);
    mut_infs.push_back(std::max(0.0, ae + class_ent - je));
    class_concs.push_back(concentration(b, cls));
  }

  out.mean = aggregate(means);
  out.range = aggregate(ranges);
  out.iq_range = aggregate(iqrs);
  out.sparsity = aggregate(sparsities);
  out.max = aggregate(maxes);
  out.attr_ent = aggregate(attr_ents);
  out.joint_ent = aggregate(joint_ents);
  out.mut_inf = aggregate(mut_infs);
  out.class_conc = aggregate(class_concs);
  out.nr_outliers = static_cast<double>(outlier_attrs);

  if (out.mut_inf.mean > kEps)
    out.ns_ratio = std::max(0.0, (out.attr_ent.mean - out.mut_inf.mean) /
                                     out.mut_inf.mean);

  // Covariance over distinct attribute pairs (|cov|).
  if (d >= 2 && n >= 2) {
    std::vector<double> covs;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j)
        covs.push_back(std::fabs(sample_cov(ds.columns[i].values, ds.columns[j].values)));
    out.cov = aggregate(covs);
  }

  // Class counts for gravity and imbalance.
  std::map<int, std::size_t> counts;
  for (int c : cls) ++counts[c];
  std::size_t min_cnt = n, max_cnt = 0;
  int min_cls = 0, max_cls = 0;
  for (const auto& [c, k] : counts) {
    if (k < min_cnt) { min_cnt = k; min_cls = c; }
    if (k > max_cnt) { max_cnt = k; max_cls = c; }
  }
  out.imbalance_ratio =
      static_cast<double>(min_cnt) / static_cast<double>(max_cnt);

  if (counts.size() >= 2) {
    // Standardize attributes, then distance between class mean vectors.
    double dist2 = 0.0;
    for (const auto& col : ds.columns) {
      double m = vec_mean(col.values), s = vec_sd(col.values);
      if (s <= 0.0) continue;  // constant attribute contributes nothing
      double sum_min = 0.0, sum_maj = 0.0;
      std::size_t n_min = 0, n_maj = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double z = (col.values[i] - m) / s;
        if (cls[i] == min_cls) { sum_min += z; ++n_min; }
        if (cls[i] == max_cls) { sum_maj += z; ++n_maj; }
      }
      double diff = sum_min / static_cast<double>(n_min) -
                    sum_maj / static_cast<double>(n_maj);
      dist2 += diff * diff;
    }
    out.gravity = std::sqrt(dist2);
  }
  return out;
}

std::array<double, kMetaSlots> MetaFeatureVector::predictor_slice() const {
  return {class_conc.mean,
          std::log10(inst_to_attr),
          mean.mean,
          mean.sd,
          range.mean,
          range.sd,
          iq_range.mean,
          iq_range.sd,
          nr_attr,
          sparsity.mean,
          gravity,
          joint_ent.mean,
          attr_ent.mean,
          cov.mean,
          max.mean,
          max.sd,
          mut_inf.mean,
          std::log10(nr_inst),
          ns_ratio};
}

const std::array<const char*, kMetaSlots>& MetaFeatureVector::slot_names() {
  static const std::array<const char*, kMetaSlots> names = {
      "class_conc.mean", "log10_inst_to_attr", "mean.mean",   "mean.sd",
      "range.mean",      "range.sd",           "iq_range.mean", "iq_range.sd",
      "nr_attr",         "sparsity.mean",      "gravity",     "joint_ent.mean",
      "attr_ent.mean",   "cov.mean",           "max.mean",    "max.sd",
      "mut_inf.mean",    "log10_nr_inst",      "ns_ratio"};
  return names;
}

std::array<double, kInputSize> assemble_input(const MetaFeatureVector& mfv,
                                              const std::vector<double>& support) {
  if (support.size() != kSupportSize)
    throw Error("support must have exactly " + std::to_string(kSupportSize) +
                " values, got " + std::to_string(support.size()));
  std::array<double, kInputSize> out{};
  std::copy(support.begin(), support.end(), out.begin());
  auto slice = mfv.predictor_slice();
  std::copy(slice.begin(), slice.end(), out.begin() + kSupportSize);
  for (double v : out)
    if (!std::isfinite(v)) throw Error("non-finite value in assembled input");
  return out;
}

}  // namespace curvecast::mf
