#pragma once

#include <array>
#include <string>
#include <vector>

#include "curvecast/types.hpp"

namespace curvecast::mf {

/// Identifier of the frozen 24-dim predictor input layout.
inline constexpr const char* kLayoutVersion = "curvecast-input-v1";
inline constexpr std::size_t kSupportSize = 5;
inline constexpr std::size_t kMetaSlots = 19;
inline constexpr std::size_t kInputSize = kSupportSize + kMetaSlots;

/// Aggregation of a per-attribute meta-feature across attributes.
/// sd is the sample standard deviation (n-1), 0 for a single attribute.
struct Agg {
  double mean = 0.0;
  double sd = 0.0;
};

/// Dataset-level meta-feature set.
///
/// Conventions (fixtures depend on these):
///  - Quantiles use linear interpolation between order statistics.
///  - Entropies are Shannon entropies in nats over a 10-bin equal-frequency
///    discretization of each attribute; the regression label is discretized
///    the same way before class-based features are computed.
///  - gravity is the Euclidean distance between the minority- and
///    majority-class means of z-standardized attributes.
///  - sparsity per attribute = (#distinct values) / n_instances.
///  - cov aggregates |sample covariance| over distinct attribute pairs.
///  - nr_outliers counts attributes with at least one value outside the
///    Tukey fences (1.5 x IQR).
///  - ns_ratio = max(0, (attr_ent.mean - mut_inf.mean) / mut_inf.mean),
///    0 when mut_inf.mean is (near) zero.
struct MetaFeatureVector {
  Agg mean, range, iq_range, sparsity, max;
  Agg attr_ent, joint_ent, mut_inf, class_conc;
  Agg cov;  // over attribute pairs; 0/0 for a single attribute
  double inst_to_attr = 0.0;
  double nr_attr = 0.0;
  double nr_inst = 0.0;
  double gravity = 0.0;
  double nr_outliers = 0.0;
  double ns_ratio = 0.0;
  double imbalance_ratio = 1.0;

  /// The 19 predictor scalars in frozen order. nr_inst and inst_to_attr are
  /// log10-transformed here.
  std::array<double, kMetaSlots> predictor_slice() const;

  /// Names matching predictor_slice() order.
  static const std::array<const char*, kMetaSlots>& slot_names();
};

MetaFeatureVector extract(const DatasetSummary& summary);

/// [support_0..support_4, 19 meta scalars].
std::array<double, kInputSize> assemble_input(const MetaFeatureVector& mfv,
                                              const std::vector<double>& support);

/// Equal-frequency discretization into `bins` bins. Returns a bin index per
/// value; bin edges are the i/bins linear-interpolation quantiles, and a
/// value lands in bin = number of edges strictly below it.
std::vector<int> equal_frequency_bins(const std::vector<double>& values,
                                      int bins = 10);

/// Linear-interpolation quantile of a sample, q in [0,1].
double quantile(std::vector<double> values, double q);

}  // namespace curvecast::mf
