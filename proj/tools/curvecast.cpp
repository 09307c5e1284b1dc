// curvecast - learning-curve prediction and benchmark distillation CLI.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curvecast/curve_models.hpp"
#include "curvecast/distill.hpp"
#include "curvecast/io.hpp"
#include "curvecast/manifest.hpp"
#include "curvecast/metafeatures.hpp"
#include "curvecast/predictor.hpp"
#include "curvecast/synth.hpp"
#include "curvecast/types.hpp"

namespace cc = curvecast;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::size_t workers = 1;
  std::vector<std::string> argv;
};

std::size_t effective_workers(std::size_t flag_value) {
  if (const char* env = std::getenv("CURVECAST_WORKERS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return v;
  }
  return flag_value;
}

/// Tracks inputs/outputs and writes one manifest next to the primary output.
class ManifestScope {
public:
  ManifestScope(std::string command, const GlobalOpts& g, std::uint64_t seed)
      : start_(std::chrono::steady_clock::now()) {
    m_.command = std::move(command);
    m_.argv = g.argv;
    m_.seed = seed;
  }
  void input(const std::string& path) {
    m_.inputs.emplace_back(path, cc::manifest::file_digest(path));
  }
  void output(const std::string& path) {
    m_.outputs.emplace_back(path, cc::manifest::file_digest(path));
    if (primary_.empty()) primary_ = path;
  }
  void finish() {
    if (primary_.empty()) return;
    m_.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    m_.write(primary_);
  }

private:
  cc::manifest::RunManifest m_;
  std::string primary_;
  std::chrono::steady_clock::time_point start_;
};

std::map<std::string, cc::ColumnKind> load_schema(const std::string& path) {
  json doc = json::parse(cc::io::read_file(path));
  std::map<std::string, cc::ColumnKind> schema;
  for (auto& [name, kind] : doc.items()) {
    std::string k = kind.get<std::string>();
    if (k == "numerical")
      schema[name] = cc::ColumnKind::numerical;
    else if (k == "categorical")
      schema[name] = cc::ColumnKind::categorical;
    else
      throw cc::Error("schema kind must be numerical or categorical, got " + k);
  }
  return schema;
}

json meta_record_json(const cc::io::MetaRecord& r) {
  const auto& names = cc::mf::MetaFeatureVector::slot_names();
  json features = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) features[names[i]] = r.slots[i];
  return {{"dataset_id", r.dataset_id},
          {"layout_version", r.layout_version},
          {"features", features}};
}

json params_json(const cc::curves::CurveParams& p) {
  return {{"A", p.A}, {"B", p.B}, {"C", p.C}, {"D", p.D}};
}

json baseline_json(const cc::curves::BaselineParams& p) {
  json j = {{"a", p.a}, {"b", p.b}};
  using F = cc::curves::Family;
  if (p.family == F::M2 || p.family == F::M3) j["c"] = p.c;
  if (p.family == F::M3) j["d"] = p.d;
  if (p.family == F::M4) {
    j["c"] = p.c;
    j["eps0"] = p.eps0;
    j["eps_inf"] = p.eps_inf;
  }
  return j;
}

/// Builds the 24-dim assembled inputs for curves that have a meta record.
std::vector<cc::predictor::TrainingRecord> build_records(
    const std::vector<cc::ValidationCurve>& curves,
    const std::vector<cc::io::MetaRecord>& meta, std::size_t k) {
  std::map<std::string, const cc::io::MetaRecord*> by_id;
  for (const auto& m : meta) by_id[m.dataset_id] = &m;
  std::vector<cc::predictor::TrainingRecord> records;
  for (const auto& c : curves) {
    auto it = by_id.find(c.dataset_id);
    if (it == by_id.end())
      throw cc::Error("no meta record for curve " + c.dataset_id);
    if (it->second->layout_version != cc::mf::kLayoutVersion)
      throw cc::Error("meta record " + c.dataset_id + " has layout '" +
                      it->second->layout_version + "', expected '" +
                      cc::mf::kLayoutVersion + "'");
    cc::predictor::TrainingRecord r;
    r.dataset_id = c.dataset_id;
    r.task = c.task;
    r.curve = c.values;
    r.input.assign(c.values.begin(), c.values.begin() + static_cast<long>(k));
    r.input.insert(r.input.end(), it->second->slots.begin(),
                   it->second->slots.end());
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<double> parse_support(const std::vector<double>& v) {
  if (v.size() != cc::mf::kSupportSize)
    throw cc::Error("--support needs exactly " +
                    std::to_string(cc::mf::kSupportSize) + " values");
  return v;
}

// --------------------------------------------------------------------------
// Subcommand implementations.

int cmd_meta(const GlobalOpts& g, const std::string& dataset,
             const std::string& schema_path, const std::string& label,
             const std::string& out) {
  ManifestScope scope("meta", g, 0);
  scope.input(dataset);
  scope.input(schema_path);
  auto ds = cc::io::load_dataset(dataset, load_schema(schema_path), label);
  auto mfv = cc::mf::extract(ds);
  cc::io::MetaRecord rec;
  rec.dataset_id = ds.id;
  rec.layout_version = cc::mf::kLayoutVersion;
  rec.slots = mfv.predictor_slice();
  json j = meta_record_json(rec);
  j["task"] = cc::to_string(ds.task);
  j["dropped_rows"] = ds.dropped_rows;
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    cc::io::write_file_atomic(out, j.dump(2) + "\n");
    scope.output(out);
    scope.finish();
  }
  return 0;
}

int cmd_fit(const GlobalOpts& g, const std::string& curves_path,
            const std::string& family, std::size_t k, std::uint64_t seed,
            const std::string& points_mode, const std::string& out) {
  ManifestScope scope("fit", g, seed);
  scope.input(curves_path);
  auto loaded = cc::io::load_curves(curves_path, k);
  json arr = json::array();
  for (const auto& c : loaded.curves) {
    std::vector<std::pair<int, double>> pts;
    if (points_mode == "support") {
      auto split = cc::curves::split_curve(c, k);
      pts = cc::curves::indexed_points(split.support);
    } else {
      pts = cc::curves::indexed_points(c.values);
    }
    json entry = {{"dataset_id", c.dataset_id}, {"family", family}};
    if (family == "ours") {
      auto fit = cc::curves::fit_law(pts);
      entry["params"] = params_json(fit.params);
      entry["residual_rmse"] = fit.residual_rmse;
      entry["converged"] = !fit.rank_deficient;
    } else {
      auto fit = cc::curves::fit_baseline(cc::curves::family_from_string(family),
                                          pts, seed);
      entry["params"] = baseline_json(fit.params);
      entry["residual_rmse"] = fit.residual_rmse;
      entry["converged"] = fit.params.converged;
    }
    arr.push_back(std::move(entry));
  }
  json doc = {{"family", family},
              {"k", k},
              {"points", points_mode},
              {"rejected_short", loaded.rejected_short},
              {"fits", arr}};
  cc::io::write_file_atomic(out, doc.dump(2) + "\n");
  scope.output(out);
  scope.finish();
  return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& curves_path,
              const std::string& meta_path, std::size_t k, std::uint64_t seed,
              double lr, std::size_t epochs, std::size_t batch,
              const std::string& out) {
  ManifestScope scope("train", g, seed);
  scope.input(curves_path);
  if (!std::filesystem::is_directory(meta_path)) scope.input(meta_path);
  auto loaded = cc::io::load_curves(curves_path, k);
  auto meta = cc::io::load_meta(meta_path);
  auto records = build_records(loaded.curves, meta, k);
  auto corpus = cc::predictor::TrainingCorpus::split(std::move(records), seed);
  cc::predictor::TrainConfig config;
  config.lr = lr;
  config.epochs = epochs;
  config.batch = batch;
  config.seed = seed;
  config.k = k;
  auto model = cc::predictor::train_predictor(corpus, config);
  cc::io::write_file_atomic(out, model.to_json());
  scope.output(out);
  scope.finish();
  return 0;
}

int cmd_predict(const GlobalOpts& g, const std::string& model_path,
                const std::string& meta_path, const std::string& dataset_id,
                const std::vector<double>& support, int horizon,
                const std::string& out) {
  ManifestScope scope("predict", g, 0);
  scope.input(model_path);
  auto model = cc::predictor::PredictorModel::from_json(cc::io::read_file(model_path));
  auto meta = cc::io::load_meta(meta_path);
  const cc::io::MetaRecord* rec = nullptr;
  if (dataset_id.empty()) {
    if (meta.size() != 1)
      throw cc::Error("meta file has " + std::to_string(meta.size()) +
                      " records; pass --dataset to pick one");
    rec = &meta[0];
  } else {
    for (const auto& m : meta)
      if (m.dataset_id == dataset_id) rec = &m;
    if (!rec) throw cc::Error("dataset " + dataset_id + " not found in meta file");
  }
  auto s = parse_support(support);
  std::vector<double> input(s);
  input.insert(input.end(), rec->slots.begin(), rec->slots.end());
  auto [theta, values] =
      cc::predictor::predict_curve(model, input, horizon, rec->layout_version);
  json j = {{"dataset_id", rec->dataset_id},
            {"theta", params_json(theta)},
            {"values", values}};
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    cc::io::write_file_atomic(out, j.dump(2) + "\n");
    scope.output(out);
    scope.finish();
  }
  return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& model_path,
             const std::string& curves_path, const std::string& meta_path,
             std::size_t k, const std::string& out) {
  ManifestScope scope("eval", g, 0);
  scope.input(model_path);
  scope.input(curves_path);
  auto model = cc::predictor::PredictorModel::from_json(cc::io::read_file(model_path));
  auto loaded = cc::io::load_curves(curves_path, k);
  auto meta = cc::io::load_meta(meta_path);
  auto records = build_records(loaded.curves, meta, k);

  std::ostringstream csv;
  csv << "dataset_id,mae,ovd\n";
  double sum_mae = 0.0, sum_ovd = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [theta, values] = cc::predictor::predict_curve(model, records[i].input, 200);
    auto score = cc::predictor::evaluate(values, loaded.curves[i]);
    csv << records[i].dataset_id << ',' << cc::io::format_real(score.mae) << ','
        << cc::io::format_real(score.ovd) << '\n';
    sum_mae += score.mae;
    sum_ovd += score.ovd;
  }
  double n = static_cast<double>(records.size());
  csv << "__mean__," << cc::io::format_real(sum_mae / n) << ','
      << cc::io::format_real(sum_ovd / n) << '\n';
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    cc::io::write_file_atomic(out, csv.str());
    scope.output(out);
    scope.finish();
  }
  return 0;
}

int cmd_advise(const std::string& model_path, const std::string& meta_path,
               const std::vector<double>& support, double best_so_far,
               int patience, double margin, const std::string& task) {
  auto model = cc::predictor::PredictorModel::from_json(cc::io::read_file(model_path));
  auto meta = cc::io::load_meta(meta_path);
  if (meta.size() != 1)
    throw cc::Error("advise expects a single-record meta file");
  auto s = parse_support(support);
  std::vector<double> input(s);
  input.insert(input.end(), meta[0].slots.begin(), meta[0].slots.end());
  auto advice = cc::predictor::advise_early_stop(
      model, input, best_so_far, patience, cc::task_from_string(task), margin);
  json j = {{"advice", advice == cc::predictor::Advice::stop ? "stop" : "continue"}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_distill(const GlobalOpts& g, const std::string& results_path,
                const std::string& strategy, double eta, std::size_t trials,
                std::uint64_t seed, const std::string& out) {
  ManifestScope scope("distill", g, seed);
  scope.input(results_path);
  auto results = cc::io::load_results(results_path);
  auto rm = cc::distill::rank(results);
  auto quota = static_cast<std::size_t>(
      std::llround(eta * static_cast<double>(rm.n_datasets())));
  if (quota < 1) quota = 1;

  cc::distill::SubsetSelection sel;
  auto strat = cc::distill::strategy_from_string(strategy);
  switch (strat) {
    case cc::distill::Strategy::greedy:
      sel = cc::distill::select_greedy(rm, quota);
      break;
    case cc::distill::Strategy::random:
      sel = cc::distill::select_random(rm, quota, trials, seed, g.workers);
      break;
    case cc::distill::Strategy::kmeans:
      sel = cc::distill::select_kmeans(rm, quota, seed);
      break;
  }
  json j = {{"strategy", cc::distill::to_string(sel.strategy)},
            {"eta", eta},
            {"quota", quota},
            {"seed", seed},
            {"trials", sel.trials},
            {"chosen", sel.chosen},
            {"rank_mae", sel.rank_mae}};
  cc::io::write_file_atomic(out, j.dump(2) + "\n");
  scope.output(out);
  scope.finish();
  return 0;
}

int cmd_treednn(const GlobalOpts& g, const std::string& results_path,
                const std::vector<std::string>& tree,
                const std::vector<std::string>& dnn, double tau,
                const std::string& sizes_path, bool balance,
                const std::string& out) {
  ManifestScope scope("treednn", g, 0);
  scope.input(results_path);
  auto results = cc::io::load_results(results_path);
  auto scores = cc::distill::tree_dnn_score(
      results, {tree.begin(), tree.end()}, {dnn.begin(), dnn.end()}, tau);

  json j;
  json sarr = json::array();
  for (const auto& s : scores)
    sarr.push_back({{"dataset_id", s.dataset_id},
                    {"score", s.score},
                    {"label", cc::distill::to_string(s.label)}});
  j["scores"] = sarr;
  j["tau"] = tau;

  if (!sizes_path.empty()) {
    scope.input(sizes_path);
    // sizes CSV: dataset_id,task,n_instances,n_features,has_categorical
    auto text = cc::io::read_file(sizes_path);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<cc::distill::DatasetInfo> info;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string id, task, n, d, cat;
      std::getline(ls, id, ',');
      std::getline(ls, task, ',');
      std::getline(ls, n, ',');
      std::getline(ls, d, ',');
      std::getline(ls, cat, ',');
      cc::distill::DatasetInfo di;
      di.dataset_id = id;
      di.task = cc::task_from_string(task);
      di.size_nd = std::stod(n) * std::stod(d);
      di.has_categorical = cat == "1" || cat == "true";
      info.push_back(std::move(di));
    }
    cc::distill::GroupPickConfig config;
    config.balance_categorical = balance;
    auto sel = cc::distill::group_and_pick(scores, info, config);
    j["selection"] = sel.chosen;
  }
  cc::io::write_file_atomic(out, j.dump(2) + "\n");
  scope.output(out);
  scope.finish();
  return 0;
}

int cmd_ttest(const GlobalOpts& g, const std::string& results_path,
              const std::string& seeds_path, const std::string& anchor,
              double alpha, const std::string& out) {
  ManifestScope scope("ttest", g, 0);
  scope.input(results_path);
  scope.input(seeds_path);
  auto results = cc::io::load_results(results_path, seeds_path);
  auto rates = cc::distill::pairwise_significance(results, anchor, alpha);
  std::ostringstream csv;
  csv << "opponent,win,tie,lose\n";
  for (const auto& r : rates)
    csv << r.opponent << ',' << cc::io::format_real(r.win) << ','
        << cc::io::format_real(r.tie) << ',' << cc::io::format_real(r.lose)
        << '\n';
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    cc::io::write_file_atomic(out, csv.str());
    scope.output(out);
    scope.finish();
  }
  return 0;
}

int cmd_synth(const GlobalOpts& g, std::size_t n_curves, double noise_sd,
              int horizon, std::uint64_t seed, const std::string& out_curves,
              const std::string& out_meta, const std::string& out_params) {
  ManifestScope scope("synth", g, seed);
  cc::synth::SynthConfig config{n_curves, noise_sd, horizon, seed};
  auto corpus = cc::synth::synth_corpus(config);

  std::vector<cc::ValidationCurve> curves;
  std::vector<cc::io::MetaRecord> meta;
  json params = json::array();
  for (const auto& rec : corpus) {
    curves.push_back(rec.curve);
    meta.push_back(rec.meta);
    params.push_back({{"dataset_id", rec.meta.dataset_id},
                      {"theta", params_json(rec.theta)}});
  }
  cc::io::save_curves(out_curves, curves);
  scope.output(out_curves);
  cc::io::save_meta(out_meta, meta);
  scope.output(out_meta);
  if (!out_params.empty()) {
    cc::io::write_file_atomic(out_params, params.dump(2) + "\n");
    scope.output(out_params);
  }
  scope.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvecast: validation-curve prediction and benchmark distillation"};
  app.set_version_flag("--version", cc::manifest::kToolVersion);
  app.require_subcommand(1);

  GlobalOpts g;
  for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
  std::size_t workers_flag = 1;
  app.add_option("--workers", workers_flag, "Worker threads for parallel stages");

  // meta
  std::string meta_dataset, meta_schema, meta_label, meta_out;
  auto* meta = app.add_subcommand("meta", "Extract dataset meta-features");
  meta->add_option("dataset", meta_dataset, "Dataset CSV")->required();
  meta->add_option("--schema", meta_schema, "Column-kind JSON map")->required();
  meta->add_option("--label", meta_label, "Label column name")->required();
  meta->add_option("--out", meta_out, "Output JSON (stdout if omitted)");

  // fit
  std::string fit_curves, fit_family = "ours", fit_points = "support", fit_out;
  std::size_t fit_k = 5;
  std::uint64_t fit_seed = 0;
  auto* fit = app.add_subcommand("fit", "Fit curve families to curves");
  fit->add_option("curves", fit_curves, "Curve corpus JSON")->required();
  fit->add_option("--family", fit_family, "ours|m1|m2|m3|m4")
      ->check(CLI::IsMember({"ours", "m1", "m2", "m3", "m4"}));
  fit->add_option("--k", fit_k, "Support size");
  fit->add_option("--seed", fit_seed, "Seed for multi-start fits");
  fit->add_option("--points", fit_points, "support|full")
      ->check(CLI::IsMember({"support", "full"}));
  fit->add_option("--out", fit_out, "Output fits JSON")->required();

  // train
  std::string train_curves, train_meta, train_out;
  std::size_t train_k = 5, train_epochs = 500, train_batch = 32;
  std::uint64_t train_seed = 0;
  double train_lr = 1e-3;
  auto* train = app.add_subcommand("train", "Train the curve predictor");
  train->add_option("--curves", train_curves)->required();
  train->add_option("--meta", train_meta, "Meta corpus JSON file or directory")->required();
  train->add_option("--k", train_k);
  train->add_option("--seed", train_seed);
  train->add_option("--lr", train_lr);
  train->add_option("--epochs", train_epochs);
  train->add_option("--batch", train_batch);
  train->add_option("--out", train_out, "Output model JSON")->required();

  // predict
  std::string pred_model, pred_meta, pred_dataset, pred_out;
  std::vector<double> pred_support;
  int pred_horizon = 200;
  auto* predict = app.add_subcommand("predict", "Predict a curve");
  predict->add_option("--model", pred_model)->required();
  predict->add_option("--meta", pred_meta)->required();
  predict->add_option("--dataset", pred_dataset, "Dataset ID within the meta file");
  predict->add_option("--support", pred_support, "First 5 epoch values")
      ->required()
      ->delimiter(',');
  predict->add_option("--horizon", pred_horizon);
  predict->add_option("--out", pred_out);

  // eval
  std::string eval_model, eval_curves, eval_meta, eval_out;
  std::size_t eval_k = 5;
  auto* eval = app.add_subcommand("eval", "Evaluate predictions (MAE/OVD)");
  eval->add_option("--model", eval_model)->required();
  eval->add_option("--curves", eval_curves)->required();
  eval->add_option("--meta", eval_meta)->required();
  eval->add_option("--k", eval_k);
  eval->add_option("--out", eval_out, "Output CSV (stdout if omitted)");

  // advise
  std::string adv_model, adv_meta, adv_task = "binclass";
  std::vector<double> adv_support;
  double adv_best = 0.0, adv_margin = 1e-4;
  int adv_patience = 200;
  auto* advise = app.add_subcommand("advise", "Early-stop recommendation");
  advise->add_option("--model", adv_model)->required();
  advise->add_option("--meta", adv_meta)->required();
  advise->add_option("--support", adv_support)->required()->delimiter(',');
  advise->add_option("--best", adv_best, "Best validation value so far")->required();
  advise->add_option("--patience", adv_patience, "Lookahead horizon in epochs");
  advise->add_option("--margin", adv_margin);
  advise->add_option("--task", adv_task)
      ->check(CLI::IsMember({"binclass", "multiclass", "regression"}));

  // distill
  std::string dist_results, dist_strategy = "greedy", dist_out;
  double dist_eta = 0.15;
  std::size_t dist_trials = 10000;
  std::uint64_t dist_seed = 0;
  auto* distill = app.add_subcommand("distill", "Select a rank-consistent subset");
  distill->add_option("--results", dist_results)->required();
  distill->add_option("--strategy", dist_strategy)
      ->check(CLI::IsMember({"greedy", "random", "kmeans"}));
  distill->add_option("--eta", dist_eta, "Subset fraction");
  distill->add_option("--trials", dist_trials);
  distill->add_option("--seed", dist_seed);
  distill->add_option("--out", dist_out)->required();

  // treednn
  std::string td_results, td_sizes, td_out;
  std::vector<std::string> td_tree, td_dnn;
  double td_tau = 0.05;
  bool td_balance = false;
  auto* treednn = app.add_subcommand("treednn", "Tree-DNN scores and diverse subset");
  treednn->add_option("--results", td_results)->required();
  treednn->add_option("--tree", td_tree, "Tree-based methods")->required()->delimiter(',');
  treednn->add_option("--dnn", td_dnn, "DNN-based methods")->required()->delimiter(',');
  treednn->add_option("--tau", td_tau, "Tie threshold on the normalized score");
  treednn->add_option("--sizes", td_sizes,
                      "CSV dataset_id,task,n_instances,n_features,has_categorical");
  treednn->add_flag("--balance", td_balance, "Balance categorical datasets");
  treednn->add_option("--out", td_out)->required();

  // ttest
  std::string tt_results, tt_seeds, tt_anchor, tt_out;
  double tt_alpha = 0.05;
  auto* ttest = app.add_subcommand("ttest", "Pairwise significance win/tie/lose");
  ttest->add_option("--results", tt_results)->required();
  ttest->add_option("--seeds", tt_seeds)->required();
  ttest->add_option("--anchor", tt_anchor)->required();
  ttest->add_option("--alpha", tt_alpha);
  ttest->add_option("--out", tt_out, "Output CSV (stdout if omitted)");

  // synth
  std::size_t sy_n = 100;
  double sy_noise = 0.0;
  int sy_horizon = 50;
  std::uint64_t sy_seed = 0;
  std::string sy_curves, sy_meta, sy_params;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--n-curves", sy_n);
  synth->add_option("--noise-sd", sy_noise);
  synth->add_option("--horizon", sy_horizon);
  synth->add_option("--seed", sy_seed);
  synth->add_option("--out-curves", sy_curves)->required();
  synth->add_option("--out-meta", sy_meta)->required();
  synth->add_option("--out-params", sy_params);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  g.workers = effective_workers(workers_flag);

  try {
    if (*meta) return cmd_meta(g, meta_dataset, meta_schema, meta_label, meta_out);
    if (*fit)
      return cmd_fit(g, fit_curves, fit_family, fit_k, fit_seed, fit_points, fit_out);
    if (*train)
      return cmd_train(g, train_curves, train_meta, train_k, train_seed,
                       train_lr, train_epochs, train_batch, train_out);
    if (*predict)
      return cmd_predict(g, pred_model, pred_meta, pred_dataset, pred_support,
                         pred_horizon, pred_out);
    if (*eval) return cmd_eval(g, eval_model, eval_curves, eval_meta, eval_k, eval_out);
    if (*advise)
      return cmd_advise(adv_model, adv_meta, adv_support, adv_best, adv_patience,
                        adv_margin, adv_task);
    if (*distill)
      return cmd_distill(g, dist_results, dist_strategy, dist_eta, dist_trials,
                         dist_seed, dist_out);
    if (*treednn)
      return cmd_treednn(g, td_results, td_tree, td_dnn, td_tau, td_sizes,
                         td_balance, td_out);
    if (*ttest) return cmd_ttest(g, tt_results, tt_seeds, tt_anchor, tt_alpha, tt_out);
    if (*synth)
      return cmd_synth(g, sy_n, sy_noise, sy_horizon, sy_seed, sy_curves,
                       sy_meta, sy_params);
  } catch (const std::exception& e) {
    json err = {{"error", e.what()}, {"tool", "curvecast"}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
