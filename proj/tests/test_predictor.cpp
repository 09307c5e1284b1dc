#include <doctest.h>

#include <cmath>
#include <set>

#include "curvecast/predictor.hpp"
#include "curvecast/rng.hpp"
#include "curvecast/synth.hpp"

using namespace curvecast;
using predictor::Mlp;
using predictor::PredictorModel;

namespace {

/// A predictor whose output is the constant theta (single zero-weight layer
/// with theta as bias); lets curve-level behavior be checked in closed form.
PredictorModel constant_model(const curves::CurveParams& theta) {
  PredictorModel m;
  m.net.layer_sizes = {mf::kInputSize, 4};
  m.net.weights = {std::vector<double>(4 * mf::kInputSize, 0.0)};
  m.net.biases = {{theta.A, theta.B, theta.C, theta.D}};
  m.norm_mean.assign(mf::kInputSize, 0.0);
  m.norm_sd.assign(mf::kInputSize, 1.0);
  return m;
}

std::vector<double> any_input() { return std::vector<double>(mf::kInputSize, 0.3); }

predictor::TrainingCorpus tiny_corpus(std::size_t n, std::uint64_t seed) {
  synth::SynthConfig cfg;
  cfg.n_curves = n;
  cfg.noise_sd = 0.005;
  cfg.horizon = 30;
  cfg.seed = seed;
  auto recs = synth::synth_corpus(cfg);
  std::vector<predictor::TrainingRecord> rows;
  for (const auto& r : recs) {
    predictor::TrainingRecord row;
    row.dataset_id = r.meta.dataset_id;
    row.task = r.curve.task;
    row.curve = r.curve.values;
    row.input.assign(r.curve.values.begin(), r.curve.values.begin() + 5);
    row.input.insert(row.input.end(), r.meta.slots.begin(), r.meta.slots.end());
    rows.push_back(std::move(row));
  }
  return predictor::TrainingCorpus::split(std::move(rows), seed);
}

}  // namespace

TEST_CASE("mlp flatten/unflatten round-trips and init is seeded") {
  auto a = predictor::make_mlp({24, 64, 64, 64, 4}, 7);
  auto b = predictor::make_mlp({24, 64, 64, 64, 4}, 7);
  auto c = predictor::make_mlp({24, 64, 64, 64, 4}, 8);
  CHECK(a.flatten() == b.flatten());
  CHECK(a.flatten() != c.flatten());
  CHECK(a.n_params() == a.flatten().size());

  auto flat = a.flatten();
  Mlp copy = a;
  for (double& w : flat) w *= -1.0;
  copy.unflatten(flat);
  auto back = copy.flatten();
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(back[i] == flat[i]);

  auto out = a.forward(any_input());
  CHECK(out.size() == 4);
}

TEST_CASE("analytic gradient matches central finite differences") {
  rng::Stream rs(21, "gradcheck");
  auto net = predictor::make_mlp({24, 8, 8, 4}, 5);
  std::vector<double> input(24), curve(12);
  for (double& x : input) x = rs.normal();
  for (std::size_t t = 0; t < curve.size(); ++t)
    curve[t] = 0.5 + 0.02 * double(t) + 0.05 * rs.uniform();

  auto [loss, grad] = predictor::loss_and_gradient(net, input, curve, 5);
  CHECK(std::isfinite(loss));
  REQUIRE(grad.size() == net.n_params());

  auto flat = net.flatten();
  const double h = 1e-5;
  // Spot-check a spread of coordinates.
  for (std::size_t i = 0; i < grad.size(); i += grad.size() / 40 + 1) {
    auto perturbed = flat;
    perturbed[i] = flat[i] + h;
    Mlp plus = net;
    plus.unflatten(perturbed);
    perturbed[i] = flat[i] - h;
    Mlp minus = net;
    minus.unflatten(perturbed);
    double fd = (predictor::loss_and_gradient(plus, input, curve, 5).first -
                 predictor::loss_and_gradient(minus, input, curve, 5).first) /
                (2 * h);
    CHECK(std::fabs(fd - grad[i]) <
          1e-4 * std::max({1.0, std::fabs(fd), std::fabs(grad[i])}));
  }
}

TEST_CASE("corpus split is disjoint, seeded, and roughly 80/20") {
  auto corpus = tiny_corpus(50, 3);
  CHECK(corpus.train_idx.size() == 40);
  CHECK(corpus.test_idx.size() == 10);
  std::set<std::size_t> train(corpus.train_idx.begin(), corpus.train_idx.end());
  for (auto i : corpus.test_idx) CHECK_FALSE(train.count(i));

  auto again = tiny_corpus(50, 3);
  CHECK(again.train_idx == corpus.train_idx);
}

TEST_CASE("fit_theta_targets rejects too-short curves by name") {
  std::vector<ValidationCurve> bad(1);
  bad[0] = {"stub", Task::binclass, Metric::accuracy, {0.1, 0.2, 0.3}};
  CHECK_THROWS_WITH_AS(static_cast<void>(predictor::fit_theta_targets(bad)),
                       doctest::Contains("stub"), Error);
}

TEST_CASE("CART feature selection finds a planted signal") {
  rng::Stream rs(13, "cart-select");
  std::vector<std::vector<double>> inputs;
  std::vector<curves::CurveParams> targets;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(24);
    for (double& v : x) v = rs.uniform();
    // Targets depend only on dims 0 and 9.
    targets.push_back({x[0], -x[9], 0.5 * x[0] + 0.5 * x[9], x[0] - x[9]});
    inputs.push_back(std::move(x));
  }
  auto report = predictor::select_meta_features(inputs, targets);
  REQUIRE(report.importance.size() == 24);
  double total = 0;
  for (double v : report.importance) {
    CHECK(v >= 0.0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(report.selected[0]);
  CHECK(report.selected[9]);
  // A pure-noise dimension must score far below the signal dimensions.
  CHECK(report.importance[0] > 10 * report.importance[3]);

  auto again = predictor::select_meta_features(inputs, targets);
  CHECK(again.importance == report.importance);
}

TEST_CASE("training is deterministic and reduces the training loss") {
  auto corpus = tiny_corpus(40, 5);
  predictor::TrainConfig cfg;
  cfg.epochs = 40;
  cfg.seed = 11;
  auto m1 = predictor::train_predictor(corpus, cfg);
  auto m2 = predictor::train_predictor(corpus, cfg);
  CHECK(m1.to_json() == m2.to_json());

  // The trained model should beat the untrained one on its own train split.
  predictor::TrainConfig cfg0 = cfg;
  cfg0.epochs = 1;
  auto m0 = predictor::train_predictor(corpus, cfg0);
  auto mean_mae = [&](const PredictorModel& m) {
    double s = 0;
    for (auto i : corpus.train_idx) {
      const auto& r = corpus.records[i];
      auto [theta, pred] = predictor::predict_curve(m, r.input, int(r.curve.size()));
      double mae = 0;
      for (std::size_t t = 5; t < r.curve.size(); ++t)
        mae += std::fabs(pred[t] - r.curve[t]);
      s += mae / double(r.curve.size() - 5);
    }
    return s / double(corpus.train_idx.size());
  };
  CHECK(mean_mae(m1) < mean_mae(m0));
}

TEST_CASE("model JSON round-trips") {
  auto corpus = tiny_corpus(30, 2);
  predictor::TrainConfig cfg;
  cfg.epochs = 5;
  auto m = predictor::train_predictor(corpus, cfg);
  auto back = PredictorModel::from_json(m.to_json());
  CHECK(back.to_json() == m.to_json());
  CHECK(back.net.forward(any_input()) == m.net.forward(any_input()));
}

TEST_CASE("predict_curve evaluates the law and checks the layout") {
  curves::CurveParams theta{0.02, -0.001, 0.4, -0.1};
  auto m = constant_model(theta);
  auto [got, values] = predictor::predict_curve(m, any_input(), 10);
  CHECK(got.A == doctest::Approx(theta.A));
  REQUIRE(values.size() == 10);
  for (int t = 1; t <= 10; ++t)
    CHECK(values[std::size_t(t) - 1] == doctest::Approx(curves::eval_law(theta, t)));

  auto [one_theta, one] = predictor::predict_curve(m, any_input(), 1);
  CHECK(one.size() == 1);

  CHECK_THROWS_AS(static_cast<void>(predictor::predict_curve(m, any_input(), 10, "other-layout")),
                  Error);
}

TEST_CASE("evaluate reproduces the hand case and metric directions") {
  ValidationCurve truth{"d", Task::binclass, Metric::accuracy, {0.5, 0.6, 0.7}};
  auto s = predictor::evaluate({0.6, 0.6, 0.6}, truth);
  CHECK(s.mae == doctest::Approx(0.2 / 3.0).epsilon(1e-9));
  CHECK(s.ovd == doctest::Approx(0.1).epsilon(1e-9));

  auto same = predictor::evaluate(truth.values, truth);
  CHECK(same.mae == 0.0);
  CHECK(same.ovd == 0.0);

  auto shifted = predictor::evaluate({0.6, 0.7, 0.8}, truth);
  CHECK(shifted.mae == doctest::Approx(0.1));
  CHECK(shifted.ovd == doctest::Approx(0.1));

  ValidationCurve reg{"d", Task::regression, Metric::normalized_rmse, {0.9, 0.5, 0.8}};
  auto r = predictor::evaluate({0.7, 0.6, 1.2}, reg);
  CHECK(r.ovd == doctest::Approx(0.1));  // |min 0.6 - min 0.5|
}

TEST_CASE("early-stop advice respects the margin boundary") {
  curves::CurveParams theta{0.0, 0.0, 0.5, 0.0};  // flat curve at 0.5
  auto m = constant_model(theta);
  using predictor::Advice;
  double margin = 1e-3;
  // Improvement exactly equal to the margin still continues.
  CHECK(predictor::advise_early_stop(m, any_input(), 0.5 - margin, 50,
                                     Task::binclass, margin) ==
        Advice::continue_training);
  CHECK(predictor::advise_early_stop(m, any_input(), 0.5, 50, Task::binclass,
                                     margin) == Advice::stop);
  // Regression flips the direction.
  CHECK(predictor::advise_early_stop(m, any_input(), 0.5 + margin, 50,
                                     Task::regression, margin) ==
        Advice::continue_training);
  CHECK(predictor::advise_early_stop(m, any_input(), 0.4, 50, Task::regression,
                                     margin) == Advice::stop);
}
