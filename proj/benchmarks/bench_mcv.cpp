#include <benchmark/benchmark.h>

#include "mcv/driver.hpp"
#include "mcv/partition.hpp"
#include "mcv/pyramid.hpp"
#include "mcv/random.hpp"

using namespace mcv;

namespace {

ImageBuffer noisy_blocks(int size, std::uint64_t seed) {
  ImageBuffer img(Lattice(size, size), 1, 255);
  Rng rng(seed);
  for (int r = 1; r <= size; ++r)
    for (int c = 1; c <= size; ++c)
      img.pixel({c, r})[0] = 40.0 * ((c * 4 / size) + (r * 4 / size)) + static_cast<double>(rng.below(5));
  return img;
}

Partition random_partition(int size, std::uint32_t labels, std::uint64_t seed) {
  LabelImage img(Lattice(size, size), 0);
  Rng rng(seed);
  for (Label& l : img.labels) l = static_cast<Label>(rng.below(labels));
  return Partition(std::move(img));
}

void BM_MergeStep(benchmark::State& state) {
  const int radius = static_cast<int>(state.range(0));
  const auto workers = static_cast<unsigned>(state.range(1));
  const int size = 2 * radius + 1;
  const Partition base = random_partition(size, 64, 1);
  const Pixel x{radius + 1, radius + 1};
  const Window psi = square_window(radius);
  for (auto _ : state) {
    Partition p = base;
    if (workers == 1)
      merge_step_inplace(p, x, nine_neighborhood(), psi);
    else
      merge_step_parallel_inplace(p, x, nine_neighborhood(), psi, workers);
    benchmark::DoNotOptimize(p.labels.labels.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size) * size);
}
BENCHMARK(BM_MergeStep)->ArgsProduct({{64, 256, 512}, {1, 2, 4, 8}})->UseRealTime();

void BM_EvaluateDirect(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const ImageBuffer img = noisy_blocks(128, 2);
  const Window w = dilate(nine_neighborhood(), level);
  const MrfModel model = MrfModel::uniform(nine_neighborhood(), Metric::euclidean, 1.0, 10.0);
  const Pixel x{64, 64};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(extract_patch(img, x, w), model));
}
BENCHMARK(BM_EvaluateDirect)->DenseRange(1, 6);

void BM_EvaluatePyramid(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const ImageBuffer img = noisy_blocks(128, 2);
  const MrfModel model = MrfModel::uniform(nine_neighborhood(), Metric::euclidean, 1.0, 10.0);
  const PyramidEvaluator pyr(nine_neighborhood(), model, 6);
  const Pixel x{64, 64};
  for (auto _ : state) benchmark::DoNotOptimize(pyr.evaluate(extract_patch(img, x, pyr.window(level)), level));
}
BENCHMARK(BM_EvaluatePyramid)->DenseRange(1, 6);

void BM_RunMcv(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const ImageBuffer img = noisy_blocks(size, 3);
  McvConfig config;
  config.model = MrfModel::uniform(nine_neighborhood(), Metric::euclidean, 1.0, 20.0);
  config.workers = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_mcv(img, config).stats.back().regions);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size) * size);
}
BENCHMARK(BM_RunMcv)->ArgsProduct({{64, 128, 256}, {1, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
