#include "curvecast/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "curvecast/cart.hpp"
#include "curvecast/io.hpp"
#include "curvecast/rng.hpp"

namespace curvecast::predictor {

namespace {
using json = nlohmann::json;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }
}  // namespace

std::vector<double> Mlp::forward(const std::vector<double>& input) const {
  std::vector<double> act = input;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    std::size_t in = layer_sizes[l], out = layer_sizes[l + 1];
    std::vector<double> next(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = biases[l][o];
      const double* w = &weights[l][o * in];
      for (std::size_t i = 0; i < in; ++i) s += w[i] * act[i];
      next[o] = s;
    }
    if (l + 1 < weights.size())
      for (double& v : next) v = std::max(0.0, v);
    act = std::move(next);
  }
  return act;
}

std::size_t Mlp::n_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    n += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  return n;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> flat;
  flat.reserve(n_params());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].begin(), weights[l].end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  return flat;
}

void Mlp::unflatten(const std::vector<double>& flat) {
  std::size_t pos = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    std::copy(flat.begin() + static_cast<long>(pos),
              flat.begin() + static_cast<long>(pos + weights[l].size()),
              weights[l].begin());
    pos += weights[l].size();
    std::copy(flat.begin() + static_cast<long>(pos),
              flat.begin() + static_cast<long>(pos + biases[l].size()),
              biases[l].begin());
    pos += biases[l].size();
  }
}

Mlp make_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
  Mlp net;
  net.layer_sizes = layer_sizes;
  rng::Stream rs(seed, "mlp_init");
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    std::size_t in = layer_sizes[l], out = layer_sizes[l + 1];
    double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(in * out), b(out, 0.0);
    for (double& v : w) v = rs.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

std::vector<double> PredictorModel::normalize(const std::vector<double>& input) const {
  if (input.size() != norm_mean.size())
    throw Error("input dimension mismatch: " + std::to_string(input.size()) +
                " vs " + std::to_string(norm_mean.size()));
  std::vector<double> out(input.size());
  for (std::size_t i = 0; i < input.size(); ++i)
    out[i] = (input[i] - norm_mean[i]) / norm_sd[i];
  return out;
}

std::string PredictorModel::to_json() const {
  json j;
  j["layer_sizes"] = net.layer_sizes;
  j["weights"] = net.weights;
  j["biases"] = net.biases;
  j["norm_mean"] = norm_mean;
  j["norm_sd"] = norm_sd;
  j["layout_version"] = layout_version;
  return j.dump(2) + "\n";
}

PredictorModel PredictorModel::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model JSON: ") + e.what());
  }
  PredictorModel m;
  m.net.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  m.net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  m.net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  m.norm_mean = j.at("norm_mean").get<std::vector<double>>();
  m.norm_sd = j.at("norm_sd").get<std::vector<double>>();
  m.layout_version = j.at("layout_version").get<std::string>();
  for (double s : m.norm_sd)
    if (s <= 0.0) throw Error("model normalization sd must be > 0");
  return m;
}

TrainingCorpus TrainingCorpus::split(std::vector<TrainingRecord> records,
                                     std::uint64_t seed, double train_fraction) {
  TrainingCorpus c;
  c.records = std::move(records);
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const auto& r : c.records)
    if (seen.insert(r.dataset_id).second) ids.push_back(r.dataset_id);
  rng::Stream rs(seed, "corpus_split");
  rs.shuffle(ids);
  std::size_t n_train = static_cast<std::size_t>(
      std::round(train_fraction * static_cast<double>(ids.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, ids.size() > 1 ? ids.size() - 1 : 1);
  std::unordered_set<std::string> train_ids(ids.begin(),
                                            ids.begin() + static_cast<long>(n_train));
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    if (train_ids.count(c.records[i].dataset_id))
      c.train_idx.push_back(i);
    else
      c.test_idx.push_back(i);
  }
  return c;
}

std::map<std::string, curves::CurveParams> fit_theta_targets(
    const std::vector<ValidationCurve>& corpus) {
  std::map<std::string, curves::CurveParams> out;
  for (const auto& c : corpus) {
    if (c.epochs() < 4)
      throw Error("curve " + c.dataset_id + " has T=" +
                  std::to_string(c.epochs()) + " < 4, cannot fit law");
    out[c.dataset_id] = curves::fit_law(curves::indexed_points(c.values)).params;
  }
  return out;
}

FeatureImportanceReport select_meta_features(
    const std::vector<std::vector<double>>& inputs,
    const std::vector<curves::CurveParams>& targets) {
  if (inputs.size() != targets.size())
    throw Error("select_meta_features: inputs/targets size mismatch");
  if (inputs.size() < 20)
    throw Error("select_meta_features needs >= 20 records, got " +
                std::to_string(inputs.size()));

  const std::size_t dims = inputs[0].size();
  FeatureImportanceReport report;
  report.importance.assign(dims, 0.0);

  for (int comp = 0; comp < 4; ++comp) {
    std::vector<double> y(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto& p = targets[i];
      y[i] = comp == 0 ? p.A : comp == 1 ? p.B : comp == 2 ? p.C : p.D;
    }
    cart::RegressionTree tree;
    tree.fit(inputs, y);
    const auto& imp = tree.importances();
    for (std::size_t d = 0; d < dims; ++d) report.importance[d] += imp[d] / 4.0;
  }
  report.selected.resize(dims);
  for (std::size_t d = 0; d < dims; ++d)
    report.selected[d] = report.importance[d] > 0.005;
  return report;
}

std::pair<double, std::vector<double>> loss_and_gradient(
    const Mlp& net, const std::vector<double>& x,
    const std::vector<double>& curve, std::size_t k) {
  if (curve.size() <= k)
    throw Error("curve too short for query loss (T <= k)");
  const std::size_t n_layers = net.weights.size();

  // Forward pass, caching activations and pre-activations.
  std::vector<std::vector<double>> acts{x};
  std::vector<std::vector<double>> pres;
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::size_t in = net.layer_sizes[l], out = net.layer_sizes[l + 1];
    std::vector<double> pre(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = net.biases[l][o];
      const double* w = &net.weights[l][o * in];
      for (std::size_t i = 0; i < in; ++i) s += w[i] * acts.back()[i];
      pre[o] = s;
    }
    pres.push_back(pre);
    if (l + 1 < n_layers)
      for (double& v : pre) v = std::max(0.0, v);
    acts.push_back(std::move(pre));
  }
  const auto& theta_v = acts.back();
  curves::CurveParams theta{theta_v[0], theta_v[1], theta_v[2], theta_v[3]};

  // MAE over query epochs, with d(pred)/d(theta) = law basis.
  const std::size_t nq = curve.size() - k;
  double loss = 0.0;
  std::vector<double> dtheta(4, 0.0);
  for (std::size_t i = k; i < curve.size(); ++i) {
    int t = static_cast<int>(i) + 1;
    auto basis = curves::law_basis(static_cast<double>(t));
    double pred = theta.A * basis[0] + theta.B * basis[1] + theta.C +
                  theta.D * basis[3];
    double err = pred - curve[i];
    loss += std::fabs(err);
    double s = sign(err) / static_cast<double>(nq);
    for (int j = 0; j < 4; ++j) dtheta[static_cast<std::size_t>(j)] += s * basis[static_cast<std::size_t>(j)];
  }
  loss /= static_cast<double>(nq);

  // Backward pass.
  std::vector<std::vector<double>> grad_w(n_layers), grad_b(n_layers);
  std::vector<double> delta = dtheta;
  for (std::size_t l = n_layers; l-- > 0;) {
    std::size_t in = net.layer_sizes[l], out = net.layer_sizes[l + 1];
    grad_w[l].assign(in * out, 0.0);
    grad_b[l] = delta;
    const auto& a_in = acts[l];
    for (std::size_t o = 0; o < out; ++o)
      for (std::size_t i = 0; i < in; ++i)
        grad_w[l][o * in + i] = delta[o] * a_in[i];
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double* w = &net.weights[l][o * in];
      for (std::size_t i = 0; i < in; ++i) prev[i] += w[i] * delta[o];
    }
    for (std::size_t i = 0; i < in; ++i)
      if (pres[l - 1][i] <= 0.0) prev[i] = 0.0;
    delta = std::move(prev);
  }

  std::vector<double> flat;
  flat.reserve(net.n_params());
  for (std::size_t l = 0; l < n_layers; ++l) {
    flat.insert(flat.end(), grad_w[l].begin(), grad_w[l].end());
    flat.insert(flat.end(), grad_b[l].begin(), grad_b[l].end());
  }
  return {loss, std::move(flat)};
}

PredictorModel train_predictor(const TrainingCorpus& corpus,
                               const TrainConfig& config) {
  if (corpus.train_idx.empty()) throw Error("empty training split");
  const std::size_t dim = corpus.records[corpus.train_idx[0]].input.size();
  if (dim != mf::kInputSize)
    throw Error("training inputs must have dimension " +
                std::to_string(mf::kInputSize));

  PredictorModel model;
  model.norm_mean.assign(dim, 0.0);
  model.norm_sd.assign(dim, 0.0);
  for (auto i : corpus.train_idx)
    for (std::size_t d = 0; d < dim; ++d)
      model.norm_mean[d] += corpus.records[i].input[d];
  double n_train = static_cast<double>(corpus.train_idx.size());
  for (double& m : model.norm_mean) m /= n_train;
  for (auto i : corpus.train_idx)
    for (std::size_t d = 0; d < dim; ++d) {
      double v = corpus.records[i].input[d] - model.norm_mean[d];
      model.norm_sd[d] += v * v;
    }
  for (double& s : model.norm_sd) {
    s = std::sqrt(s / n_train);
    if (s <= 0.0) s = 1.0;  // zero-variance dims pass through
  }

  model.net = make_mlp({mf::kInputSize, 64, 64, 64, 4}, config.seed);

  std::vector<std::vector<double>> norm_inputs(corpus.records.size());
  for (auto i : corpus.train_idx)
    norm_inputs[i] = model.normalize(corpus.records[i].input);

  std::vector<double> params = model.net.flatten();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<std::size_t> order(corpus.train_idx);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng::Stream rs(config.seed, "train_epoch/" + std::to_string(epoch));
    rs.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      std::size_t end = std::min(start + config.batch, order.size());
      std::vector<double> grad(params.size(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const auto& rec = corpus.records[order[b]];
        auto [loss, g] =
            loss_and_gradient(model.net, norm_inputs[order[b]], rec.curve, config.k);
        batch_loss += loss;
        for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += g[j];
      }
      double inv = 1.0 / static_cast<double>(end - start);
      if (!std::isfinite(batch_loss))
        throw Error("non-finite training loss (lr=" + io::format_real(config.lr) +
                    ", epoch=" + std::to_string(epoch) +
                    ", batch at index " + std::to_string(start) + ")");
      for (std::size_t j = 0; j < params.size(); ++j) {
        velocity[j] = config.momentum * velocity[j] - config.lr * grad[j] * inv;
        params[j] += velocity[j];
      }
      model.net.unflatten(params);
    }
  }
  return model;
}

std::pair<curves::CurveParams, std::vector<double>> predict_curve(
    const PredictorModel& model, const std::vector<double>& input, int horizon,
    const std::string& layout_version) {
  if (layout_version != model.layout_version)
    throw Error("input layout version '" + layout_version +
                "' does not match model layout '" + model.layout_version + "'");
  auto out = model.net.forward(model.normalize(input));
  curves::CurveParams theta{out[0], out[1], out[2], out[3]};
  return {theta, curves::extrapolate(theta, horizon)};
}

CurveScore evaluate(const std::vector<double>& predicted,
                    const ValidationCurve& truth) {
  if (truth.values.empty()) throw Error("evaluate: empty truth curve");
  std::size_t overlap = std::min<std::size_t>(200, truth.epochs());
  overlap = std::min(overlap, predicted.size());
  if (overlap == 0) throw Error("evaluate: empty overlap");

  CurveScore score;
  for (std::size_t i = 0; i < overlap; ++i)
    score.mae += std::fabs(predicted[i] - truth.values[i]);
  score.mae /= static_cast<double>(overlap);

  std::size_t pred_range = std::min<std::size_t>(200, predicted.size());
  auto pred_begin = predicted.begin();
  auto pred_end = predicted.begin() + static_cast<long>(pred_range);
  if (truth.task == Task::regression) {
    double p = *std::min_element(pred_begin, pred_end);
    double t = *std::min_element(truth.values.begin(), truth.values.end());
    score.ovd = std::fabs(p - t);
  } else {
    double p = *std::max_element(pred_begin, pred_end);
    double t = *std::max_element(truth.values.begin(), truth.values.end());
    score.ovd = std::fabs(p - t);
  }
  return score;
}

Advice advise_early_stop(const PredictorModel& model,
                         const std::vector<double>& input, double best_so_far,
                         int patience_horizon, Task task, double margin) {
  auto [theta, values] = predict_curve(model, input, patience_horizon);
  double improvement;
  if (task == Task::regression) {
    double opt = *std::min_element(values.begin(), values.end());
    improvement = best_so_far - opt;
  } else {
    double opt = *std::max_element(values.begin(), values.end());
    improvement = opt - best_so_far;
  }
  return improvement >= margin ? Advice::continue_training : Advice::stop;
}

}  // namespace curvecast::predictor
