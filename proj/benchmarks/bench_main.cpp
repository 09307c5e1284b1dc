#include <benchmark/benchmark.h>

#include "curvecast/curve_models.hpp"
#include "curvecast/distill.hpp"
#include "curvecast/metafeatures.hpp"
#include "curvecast/predictor.hpp"
#include "curvecast/rng.hpp"

using namespace curvecast;

namespace {

std::vector<std::pair<int, double>> law_points(int n) {
  curves::CurveParams p{0.03, -0.002, 0.4, -0.15};
  std::vector<std::pair<int, double>> pts;
  for (int t = 1; t <= n; ++t) pts.emplace_back(t, curves::eval_law(p, t));
  return pts;
}

ResultsTable random_results(std::size_t D, std::size_t L, std::uint64_t seed) {
  rng::Stream rs(seed, "bench");
  ResultsTable t;
  for (std::size_t m = 0; m < L; ++m) t.methods.push_back("m" + std::to_string(m));
  for (std::size_t d = 0; d < D; ++d) {
    t.datasets.push_back("d" + std::to_string(d));
    t.higher_is_better.push_back(true);
    std::vector<double> row(L);
    for (double& v : row) v = rs.uniform();
    t.values.push_back(std::move(row));
  }
  return t;
}

void BM_FitLaw(benchmark::State& state) {
  auto pts = law_points(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(curves::fit_law(pts));
}
BENCHMARK(BM_FitLaw)->Arg(5)->Arg(50)->Arg(200);

void BM_FitBaselineM2(benchmark::State& state) {
  auto pts = law_points(30);
  for (auto _ : state)
    benchmark::DoNotOptimize(curves::fit_baseline(curves::Family::M2, pts, 0));
}
BENCHMARK(BM_FitBaselineM2);

void BM_RankMatrix(benchmark::State& state) {
  auto t = random_results(std::size_t(state.range(0)), 27, 1);
  for (auto _ : state) benchmark::DoNotOptimize(distill::rank(t));
}
BENCHMARK(BM_RankMatrix)->Arg(50)->Arg(300);

void BM_SelectGreedy(benchmark::State& state) {
  auto rm = distill::rank(random_results(std::size_t(state.range(0)), 27, 2));
  std::size_t quota = rm.n_datasets() * 15 / 100;
  for (auto _ : state)
    benchmark::DoNotOptimize(distill::select_greedy(rm, quota));
}
BENCHMARK(BM_SelectGreedy)->Arg(100)->Arg(300);

void BM_SelectRandomTrials(benchmark::State& state) {
  auto rm = distill::rank(random_results(100, 27, 3));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        distill::select_random(rm, 15, std::size_t(state.range(0)), 0, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectRandomTrials)->Arg(100)->Arg(1000);

void BM_MlpForward(benchmark::State& state) {
  auto net = predictor::make_mlp({24, 64, 64, 64, 4}, 0);
  std::vector<double> input(24, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(input));
}
BENCHMARK(BM_MlpForward);

void BM_LossAndGradient(benchmark::State& state) {
  auto net = predictor::make_mlp({24, 64, 64, 64, 4}, 0);
  std::vector<double> input(24, 0.3);
  std::vector<double> curve(50, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(predictor::loss_and_gradient(net, input, curve, 5));
}
BENCHMARK(BM_LossAndGradient);

}  // namespace

BENCHMARK_MAIN();
