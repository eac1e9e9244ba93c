#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "dualwarp/datagen.hpp"
#include "dualwarp/errors.hpp"
#include "dualwarp/io.hpp"
#include "dualwarp/scene.hpp"
#include "support.hpp"

namespace dualwarp {
namespace {

double yaw_degrees(const Pose& p) {
  return std::atan2(p.rotation()(0, 2), p.rotation()(0, 0)) * 180.0 / M_PI;
}

std::vector<DepthImage> small_renders(int count, int w = 48, int h = 36) {
  const CameraIntrinsics k{45, (w - 1) / 2.0, (h - 1) / 2.0};
  std::vector<DepthImage> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(render_depth(random_scene(derive_seed(77, i)), k, Pose::identity(), w, h));
  }
  return out;
}

const CameraIntrinsics kSmall{45, 23.5, 17.5};

TEST(SamplePose, ZeroRangesGiveIdentity) {
  PoseSamplerConfig cfg{0.0, 0.0, 9};
  for (std::uint64_t i = 0; i < 50; ++i) {
    EXPECT_TRUE(sample_pose(cfg, i).is_approx(Pose::identity(), 0.0));
  }
}

TEST(SamplePose, UniformWithinDefaultRanges) {
  PoseSamplerConfig cfg;
  cfg.seed = 123;
  const int n = 10000;
  double sx = 0, sz = 0, syaw = 0;
  double min_x = 1e9, max_x = -1e9, min_yaw = 1e9, max_yaw = -1e9;
  for (int i = 0; i < n; ++i) {
    const Pose p = sample_pose(cfg, static_cast<std::uint64_t>(i));
    const auto& t = p.translation();
    ASSERT_EQ(t.y(), 0.0);
    ASSERT_LE(std::abs(t.x()), 1.0);
    ASSERT_LE(std::abs(t.z()), 1.0);
    // Pure yaw: the vertical axis is untouched.
    ASSERT_NEAR((p.rotation().col(1) - Eigen::Vector3d::UnitY()).norm(), 0.0, 1e-15);
    const double yaw = yaw_degrees(p);
    ASSERT_LE(std::abs(yaw), 15.0 + 1e-9);
    sx += t.x();
    sz += t.z();
    syaw += yaw;
    min_x = std::min(min_x, t.x());
    max_x = std::max(max_x, t.x());
    min_yaw = std::min(min_yaw, yaw);
    max_yaw = std::max(max_yaw, yaw);
  }
  // Mean of n uniform draws on [-a, a] has standard deviation a / sqrt(3 n).
  const double sigma_t = 1.0 / std::sqrt(3.0 * n);
  const double sigma_yaw = 15.0 / std::sqrt(3.0 * n);
  EXPECT_LT(std::abs(sx / n), 3 * sigma_t);
  EXPECT_LT(std::abs(sz / n), 3 * sigma_t);
  EXPECT_LT(std::abs(syaw / n), 3 * sigma_yaw);
  // The range is actually used.
  EXPECT_LT(min_x, -0.99);
  EXPECT_GT(max_x, 0.99);
  EXPECT_LT(min_yaw, -14.9);
  EXPECT_GT(max_yaw, 14.9);
}

TEST(SamplePose, Deterministic) {
  PoseSamplerConfig cfg;
  cfg.seed = 5;
  EXPECT_EQ(sample_pose(cfg, 17), sample_pose(cfg, 17));
  EXPECT_FALSE(sample_pose(cfg, 17) == sample_pose(cfg, 18));
  EXPECT_THROW(sample_pose(PoseSamplerConfig{-1.0, 15.0, 0}, 0), InvalidArgument);
}

TEST(Strategy1, ManifestHasOneEntryPerPair) {
  testing::TempDir dir;
  const auto images = small_renders(4);
  const GenerationResult r = generate_strategy1(images, kSmall, PoseSamplerConfig{}, WarpConfig{},
                                                25, dir.path());
  EXPECT_EQ(r.manifest.entries.size() + r.skipped.size(), 100u);
  EXPECT_EQ(r.manifest.entries.size(), 100u);
  EXPECT_EQ(read_manifest(dir / "manifest.jsonl"), r.manifest);
}

TEST(Strategy1, ZeroPairsGivesEmptyManifest) {
  testing::TempDir dir;
  const GenerationResult r =
      generate_strategy1(small_renders(2), kSmall, PoseSamplerConfig{}, WarpConfig{}, 0, dir.path());
  EXPECT_TRUE(r.manifest.entries.empty());
  EXPECT_EQ(read_text_file(dir / "manifest.jsonl"), "");
}

TEST(Strategy1, ZeroRangesReproduceTheInput) {
  testing::TempDir dir;
  const auto images = small_renders(2);
  const GenerationResult r = generate_strategy1(images, kSmall, PoseSamplerConfig{0, 0, 1},
                                                WarpConfig{}, 3, dir.path());
  for (const auto& e : r.manifest.entries) {
    const TrainingPair p = load_pair(e, dir.path());
    EXPECT_EQ(p.occluded, p.complete);
    EXPECT_TRUE(p.mask.empty());
  }
}

TEST(Strategy1, FilesSatisfyFidelity) {
  testing::TempDir dir;
  const GenerationResult r = generate_strategy1(small_renders(3), kSmall, PoseSamplerConfig{},
                                                WarpConfig{}, 5, dir.path());
  for (const auto& e : r.manifest.entries) {
    const TrainingPair p = load_pair(e, dir.path());
    for (std::size_t i = 0; i < p.complete.size(); ++i) {
      if (p.occluded.known(i)) {
        ASSERT_EQ(p.occluded.at(i), p.complete.at(i));
      }
      ASSERT_EQ(p.mask.at(i), p.complete.known(i) && !p.occluded.known(i));
    }
  }
}

TEST(Strategy1, EmptyResultsAreSkipped) {
  testing::TempDir dir;
  const GenerationResult r = generate_strategy1({DepthImage(8, 8)}, {8, 3.5, 3.5},
                                                PoseSamplerConfig{}, WarpConfig{}, 2, dir.path());
  EXPECT_TRUE(r.manifest.entries.empty());
  EXPECT_EQ(r.skipped.size(), 2u);
}

TEST(Strategy1, UnwritableOutputIsAnIoError) {
  testing::TempDir dir;
  write_text_file(dir / "file", "x");
  EXPECT_THROW(generate_strategy1(small_renders(1), kSmall, PoseSamplerConfig{}, WarpConfig{}, 1,
                                  dir / "file" / "sub"),
               IoError);
}

TEST(Strategy1, OutputDoesNotDependOnJobs) {
  testing::TempDir a;
  testing::TempDir b;
  const auto images = small_renders(3);
  PoseSamplerConfig cfg;
  cfg.seed = 99;
  generate_strategy1(images, kSmall, cfg, WarpConfig{}, 4, a.path(), 1);
  generate_strategy1(images, kSmall, cfg, WarpConfig{}, 4, b.path(), 4);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), a.path());
    EXPECT_EQ(read_file(entry.path()), read_file(b.path() / rel)) << rel;
  }
}

TEST(RemoveBlocks, BudgetBelowOneBlockRemovesNothing) {
  // A 10x10 block in a 100x100 frame is 1% of the pixels.
  BlockRemovalConfig cfg{0.0099, 10, 10, 4};
  EXPECT_TRUE(remove_blocks(100, 100, cfg, 1).empty());
}

TEST(RemoveBlocks, DefaultsStayWithinBudget) {
  BlockRemovalConfig cfg;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const PixelMask m = remove_blocks(512, 384, cfg, s);
    const double fraction = static_cast<double>(m.count()) / (512.0 * 384.0);
    EXPECT_GT(fraction, 0.0);
    EXPECT_LE(fraction, 0.20);
  }
}

TEST(RemoveBlocks, FillsTheBudgetTightlyWhenBlocksAreSmall) {
  // With 1x1 blocks the loop can always make progress until the budget.
  BlockRemovalConfig cfg{0.25, 1, 1, 0};
  EXPECT_EQ(remove_blocks(20, 20, cfg, 3).count(), 100u);
}

TEST(RemoveBlocks, DeterministicAndSeedSensitive) {
  BlockRemovalConfig cfg;
  EXPECT_EQ(remove_blocks(64, 48, cfg, 5), remove_blocks(64, 48, cfg, 5));
  EXPECT_FALSE(remove_blocks(64, 48, cfg, 5) == remove_blocks(64, 48, cfg, 6));
}

TEST(RemoveBlocks, RejectsBadConfig) {
  EXPECT_THROW(remove_blocks(8, 8, {0.0, 1, 5, 0}, 0), InvalidArgument);
  EXPECT_THROW(remove_blocks(8, 8, {0.2, 5, 1, 0}, 0), InvalidArgument);
  EXPECT_THROW(remove_blocks(8, 8, {0.2, 0, 1, 0}, 0), InvalidArgument);
}

TEST(Strategy2, MasksRecordRemovedKnownPixels) {
  testing::TempDir dir;
  const auto images = small_renders(2);
  const GenerationResult r =
      generate_strategy2(images, kSmall, BlockRemovalConfig{}, 3, dir.path());
  ASSERT_EQ(r.manifest.entries.size(), 6u);
  for (const auto& e : r.manifest.entries) {
    EXPECT_EQ(e.strategy, "blocks");
    const TrainingPair p = load_pair(e, dir.path());
    for (std::size_t i = 0; i < p.complete.size(); ++i) {
      if (p.occluded.known(i)) ASSERT_EQ(p.occluded.at(i), p.complete.at(i));
      ASSERT_EQ(p.mask.at(i), p.complete.known(i) && !p.occluded.known(i));
    }
    EXPECT_LE(p.mask.count(), static_cast<std::size_t>(0.2 * p.complete.size()));
  }
}

TrainingPair sample_pair() {
  const auto images = small_renders(1);
  return make_dual_pair(images[0], kSmall, PoseSamplerConfig{}, WarpConfig{}, 3);
}

TEST(Augment, FlipTwiceIsIdentity) {
  const TrainingPair p = sample_pair();
  const CropWindow win{5, 3, 30, 20};
  const TrainingPair once = augment(p, win, true);
  const TrainingPair twice = augment(once, CropWindow{0, 0, 30, 20}, true);
  const TrainingPair plain = augment(p, win, false);
  EXPECT_EQ(twice.complete, plain.complete);
  EXPECT_EQ(twice.occluded, plain.occluded);
  EXPECT_EQ(twice.mask, plain.mask);
  EXPECT_TRUE(twice.pose.is_approx(plain.pose, 0.0));
  EXPECT_DOUBLE_EQ(twice.intrinsics.cx, plain.intrinsics.cx);
}

TEST(Augment, FullFrameWithoutFlipIsIdentity) {
  const TrainingPair p = sample_pair();
  const TrainingPair q = augment(p, CropWindow{0, 0, p.complete.width(), p.complete.height()}, false);
  EXPECT_EQ(q.complete, p.complete);
  EXPECT_EQ(q.occluded, p.occluded);
  EXPECT_EQ(q.mask, p.mask);
  EXPECT_EQ(q.pose, p.pose);
  EXPECT_EQ(q.intrinsics, p.intrinsics);
}

TEST(Augment, FlipMirrorsColumnsAndKeepsMaskSize) {
  const TrainingPair p = sample_pair();
  const int w = p.complete.width();
  const TrainingPair q = augment(p, CropWindow{0, 0, w, p.complete.height()}, true);
  EXPECT_EQ(q.mask.count(), p.mask.count());
  for (int y = 0; y < p.complete.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      ASSERT_EQ(q.complete(x, y), p.complete(w - 1 - x, y));
      ASSERT_EQ(q.mask(x, y), p.mask(w - 1 - x, y));
    }
  }
}

TEST(Augment, FlippedIntrinsicsProjectMirroredPoints) {
  const TrainingPair p = sample_pair();
  const int w = p.complete.width();
  const TrainingPair q = augment(p, CropWindow{0, 0, w, p.complete.height()}, true);
  const Eigen::Vector3d point(0.4, -0.2, 3.0);
  const double x = p.intrinsics.f * point.x() / point.z() + p.intrinsics.cx;
  const double xm = q.intrinsics.f * -point.x() / point.z() + q.intrinsics.cx;
  EXPECT_NEAR(xm, (w - 1) - x, 1e-12);
}

TEST(Augment, RandomCropIsSeededAndChecked) {
  const TrainingPair p = sample_pair();
  const TrainingPair a = augment(p, 32, 24, false, 7);
  const TrainingPair b = augment(p, 32, 24, false, 7);
  EXPECT_EQ(a.complete, b.complete);
  EXPECT_EQ(a.complete.width(), 32);
  EXPECT_THROW(augment(p, 100, 24, false, 7), InvalidArgument);
  EXPECT_THROW(augment(p, CropWindow{40, 0, 20, 10}, false), InvalidArgument);
}

}  // namespace
}  // namespace dualwarp
