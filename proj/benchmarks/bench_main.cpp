#include <benchmark/benchmark.h>

#include "dualwarp/complete.hpp"
#include "dualwarp/datagen.hpp"
#include "dualwarp/scene.hpp"
#include "dualwarp/warp.hpp"

namespace {

using namespace dualwarp;

struct Frame {
  CameraIntrinsics k;
  DepthImage depth;
};

// Random oracle scene at width x (3/4 width).
Frame frame(int w) {
  const int h = w * 3 / 4;
  const CameraIntrinsics k{0.8125 * w, (w - 1) / 2.0, (h - 1) / 2.0};
  return {k, render_depth(random_scene(5), k, Pose::identity(), w, h)};
}

void BM_RenderDepth(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const Scene scene = random_scene(5);
  const CameraIntrinsics k{0.8125 * w, (w - 1) / 2.0, (w * 3 / 4 - 1) / 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_depth(scene, k, Pose::identity(), w, w * 3 / 4));
  }
}
BENCHMARK(BM_RenderDepth)->Arg(160)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_WarpDepth(benchmark::State& state) {
  const Frame f = frame(512);
  WarpConfig cfg;
  cfg.supersample = static_cast<int>(state.range(0));
  const Pose pose = sample_pose({}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(warp_depth(f.depth, f.k, pose, cfg));
}
BENCHMARK(BM_WarpDepth)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_DualWarp(benchmark::State& state) {
  const Frame f = frame(512);
  WarpConfig cfg;
  cfg.supersample = static_cast<int>(state.range(0));
  const Pose pose = sample_pose({}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dual_warp(f.depth, f.k, pose, cfg));
}
BENCHMARK(BM_DualWarp)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_NearestValidField(benchmark::State& state) {
  const Frame f = frame(512);
  BlockRemovalConfig blocks;
  blocks.max_removed_fraction = static_cast<double>(state.range(0)) / 100.0;
  const TrainingPair pair = make_block_pair(f.depth, f.k, blocks, 3);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_valid_field(pair.occluded, pair.mask));
}
BENCHMARK(BM_NearestValidField)->Arg(5)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_DiffuseInpaint(benchmark::State& state) {
  const Frame f = frame(160);
  const TrainingPair pair = make_block_pair(f.depth, f.k, {}, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(diffuse_inpaint(pair.occluded, pair.mask, 5000, 1e-6));
  }
}
BENCHMARK(BM_DiffuseInpaint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
