#include <benchmark/benchmark.h>

#include <random>

#include "support.hpp"
#include "synthhome/genjson.hpp"
#include "synthhome/label.hpp"
#include "synthhome/occlusion.hpp"
#include "synthhome/simulate.hpp"
#include "synthhome/util.hpp"

using namespace synthhome;

static void BM_Surrogate(benchmark::State& state) {
  const auto f = test::square_building(12.0, 0.4, 0.5);
  const Climate c;
  for (auto _ : state) benchmark::DoNotOptimize(run_surrogate(f, c));
}
BENCHMARK(BM_Surrogate);

static void BM_RenderIdf(benchmark::State& state) {
  const auto f = test::square_building(12.0, 0.4, 0.5);
  const auto t = IdfTemplate::builtin();
  for (auto _ : state) benchmark::DoNotOptimize(render_idf(f, t));
}
BENCHMARK(BM_RenderIdf);

static void BM_ParseEngineTable(benchmark::State& state) {
  const auto text = read_text(test::fixture("engine/eplustbl.csv"));
  for (auto _ : state) benchmark::DoNotOptimize(parse_engine_table(text));
}
BENCHMARK(BM_ParseEngineTable);

static void BM_ValidateFeature(benchmark::State& state) {
  const auto text = read_text(test::fixture("feature_reference.geojson"));
  for (auto _ : state) benchmark::DoNotOptimize(validate_feature(text));
}
BENCHMARK(BM_ValidateFeature);

static void BM_RegionStats(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(0, 2);
  OcclusionReport r;
  r.grid_rows = r.grid_cols = k;
  std::vector<bool> mask(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k * k; ++i) {
    r.distances.push_back(d(rng));
    mask[static_cast<std::size_t>(i)] = i % 3 == 0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(region_stats(r, mask));
}
BENCHMARK(BM_RegionStats)->Arg(10)->Arg(32);

static void BM_GridAndMask(benchmark::State& state) {
  const cv::Mat img(512, 512, CV_8UC3, cv::Scalar(120, 130, 140));
  for (auto _ : state) {
    for (const auto& cell : grid_cells(img.cols, img.rows, 100)) benchmark::DoNotOptimize(mask_cell(img, cell.rect));
  }
}
BENCHMARK(BM_GridAndMask);

static void BM_CosineDistance(benchmark::State& state) {
  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (auto& x : a) x = g(rng);
  for (auto& x : b) x = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(cosine_distance(a, b));
}
BENCHMARK(BM_CosineDistance)->Arg(256)->Arg(1536);

static void BM_HeuristicAndCombine(benchmark::State& state) {
  double a = 4000;
  for (auto _ : state) {
    a = a >= 10000 ? 4000 : a + 1;
    benchmark::DoNotOptimize(combine(heuristic_score(a, 4000, 10000), 0.5));
  }
}
BENCHMARK(BM_HeuristicAndCombine);
BENCHMARK_MAIN();
