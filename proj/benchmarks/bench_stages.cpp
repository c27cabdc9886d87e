#include <benchmark/benchmark.h>

#include <random>

#include "focalgraph/evalkit.hpp"
#include "focalgraph/graph.hpp"
#include "focalgraph/pipeline.hpp"

using namespace focalgraph;

namespace {

const SyntheticStack& stack_640() {
  static const SyntheticStack s = synth_stack(slanted_scene(640, 512, 2.0, 17.0, 5), 20);
  return s;
}

void BM_FocusSlice(benchmark::State& state) {
  const Grayscale8& image = stack_640().stack.images[10];
  for (auto _ : state) benchmark::DoNotOptimize(compute_focus_slice(image, 10));
  state.SetItemsProcessed(state.iterations() * image.width() * image.height());
}
BENCHMARK(BM_FocusSlice)->Unit(benchmark::kMillisecond);

void BM_Delaunay(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> x(0, 639), y(0, 511);
  std::vector<Point2> points;
  for (int i = 0; i < state.range(0); ++i) points.push_back({double(x(rng)), double(y(rng))});
  for (auto _ : state) benchmark::DoNotOptimize(delaunay_triangulate(points));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Delaunay)->RangeMultiplier(4)->Range(256, 16384)->Complexity()->Unit(benchmark::kMillisecond);

void BM_DepthStage(benchmark::State& state) {
  PipelineParams params;
  params.threads = 1;
  params.use_all_nodes = state.range(0) != 0;
  const auto slices = preprocess(stack_640().stack, params.canny, 1);
  for (auto _ : state) {
    state.PauseTiming();
    auto copy = slices;
    state.ResumeTiming();
    benchmark::DoNotOptimize(estimate_depth(std::move(copy), params));
  }
}
BENCHMARK(BM_DepthStage)->Arg(0)->Arg(1)->ArgName("all_nodes")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
