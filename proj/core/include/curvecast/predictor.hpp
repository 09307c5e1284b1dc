#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curvecast/curve_models.hpp"
#include "curvecast/metafeatures.hpp"
#include "curvecast/types.hpp"

namespace curvecast::predictor {

/// Feed-forward network with rectifier hidden layers and a linear output.
struct Mlp {
  std::vector<std::size_t> layer_sizes;  // [24, 64, 64, 64, 4]
  /// weights[l] is row-major (out x in); biases[l] has `out` entries.
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  std::vector<double> forward(const std::vector<double>& input) const;

  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);
  std::size_t n_params() const;
};

struct PredictorModel {
  Mlp net;
  std::vector<double> norm_mean;  // per input dimension
  std::vector<double> norm_sd;    // > 0 (zero-variance dims frozen to 1)
  std::string layout_version = mf::kLayoutVersion;

  std::vector<double> normalize(const std::vector<double>& input) const;
  std::string to_json() const;
  static PredictorModel from_json(const std::string& text);
};

struct TrainingRecord {
  std::string dataset_id;
  std::vector<double> input;   // 24-dim assembled vector
  std::vector<double> curve;   // full observed curve values
  Task task = Task::binclass;
};

struct TrainingCorpus {
  std::vector<TrainingRecord> records;
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;

  /// Seeded 80/20 split by dataset ID; no ID appears in both splits.
  static TrainingCorpus split(std::vector<TrainingRecord> records,
                              std::uint64_t seed, double train_fraction = 0.8);
};

struct FeatureImportanceReport {
  /// Mean importance per input dimension, averaged over the four
  /// per-parameter trees; each tree's importances sum to 1.
  std::vector<double> importance;
  std::vector<bool> selected;  // importance > 0.005
};

struct TrainConfig {
  double lr = 1e-3;
  std::size_t epochs = 500;
  std::uint64_t seed = 0;
  std::size_t batch = 32;
  std::size_t k = mf::kSupportSize;
  double momentum = 0.9;
};

/// Step 1 of the two-step pipeline: per-curve law fit on the full curve.
std::map<std::string, curves::CurveParams> fit_theta_targets(
    const std::vector<ValidationCurve>& corpus);

/// Step 2a: per-parameter CART trees, importances averaged over the four
/// targets; selected = importance > 0.005.
FeatureImportanceReport select_meta_features(
    const std::vector<std::vector<double>>& inputs,
    const std::vector<curves::CurveParams>& targets);

/// Step 2b: train the MLP by SGD with momentum, back-propagating the mean
/// absolute error between the extrapolated curve and the observed query
/// values (epochs k+1..T). Deterministic per seed.
PredictorModel train_predictor(const TrainingCorpus& corpus,
                               const TrainConfig& config);

std::pair<curves::CurveParams, std::vector<double>> predict_curve(
    const PredictorModel& model, const std::vector<double>& input,
    int horizon, const std::string& layout_version = mf::kLayoutVersion);

struct CurveScore {
  double mae = 0.0;
  double ovd = 0.0;
};

/// MAE over the overlapping epochs (t = 1..min(200, T)); OVD compares the
/// predicted optimum over t = 1..200 with the observed optimum (max for
/// classification, min for regression).
CurveScore evaluate(const std::vector<double>& predicted,
                    const ValidationCurve& truth);

enum class Advice { continue_training, stop };

/// Stop iff the predicted optimum within `patience_horizon` fails to improve
/// on best_so_far by at least `margin` (improvement of exactly `margin`
/// still continues).
Advice advise_early_stop(const PredictorModel& model,
                         const std::vector<double>& input, double best_so_far,
                         int patience_horizon, Task task, double margin = 1e-4);

/// Loss of one record and its gradient w.r.t. the flattened weights;
/// used by the finite-difference gradient checks.
std::pair<double, std::vector<double>> loss_and_gradient(
    const Mlp& net, const std::vector<double>& normalized_input,
    const std::vector<double>& curve, std::size_t k);

/// Seeded symmetric-uniform (fan-in scaled) initialization.
Mlp make_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed);

}  // namespace curvecast::predictor
