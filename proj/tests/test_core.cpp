#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dualwarp/camera.hpp"
#include "dualwarp/errors.hpp"
#include "dualwarp/image.hpp"
#include "dualwarp/random.hpp"
#include "support.hpp"

namespace dualwarp {
namespace {

TEST(Intrinsics, ScaleByTwo) {
  const auto k = intrinsics_scale({500, 320, 240}, 2.0);
  EXPECT_EQ(k, CameraIntrinsics(1000, 640, 480));
}

TEST(Intrinsics, ScaleByOneIsIdentity) {
  const CameraIntrinsics k{517.3, 318.6, 255.3};
  EXPECT_EQ(intrinsics_scale(k, 1.0), k);
}

TEST(Intrinsics, ScaleByHalf) {
  EXPECT_EQ(intrinsics_scale({500, 320, 240}, 0.5), CameraIntrinsics(250, 160, 120));
}

TEST(Intrinsics, RejectsBadValues) {
  EXPECT_THROW(intrinsics_scale({500, 320, 240}, 0.0), InvalidArgument);
  EXPECT_THROW(intrinsics_scale({500, 320, 240}, -2.0), InvalidArgument);
  EXPECT_THROW(CameraIntrinsics(0.0, 1, 1), InvalidArgument);
  EXPECT_THROW(CameraIntrinsics(1.0, std::nan(""), 1), InvalidArgument);
}

TEST(Intrinsics, ScaleComposes) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const CameraIntrinsics k{rng.uniform(1, 900), rng.uniform(-50, 700), rng.uniform(-50, 500)};
    const double a = rng.uniform(0.1, 4);
    const double b = rng.uniform(0.1, 4);
    const auto lhs = intrinsics_scale(intrinsics_scale(k, a), b);
    const auto rhs = intrinsics_scale(k, a * b);
    EXPECT_NEAR(lhs.f, rhs.f, 1e-9 * rhs.f);
    EXPECT_NEAR(lhs.cx, rhs.cx, 1e-9 * (1 + std::abs(rhs.cx)));
    EXPECT_NEAR(lhs.cy, rhs.cy, 1e-9 * (1 + std::abs(rhs.cy)));
  }
}

TEST(Pose, ComposeWithIdentity) {
  Rng rng(1);
  const Pose p = testing::random_pose(rng);
  EXPECT_TRUE(pose_compose(Pose::identity(), p).is_approx(p, 1e-15));
  EXPECT_TRUE(pose_compose(p, Pose::identity()).is_approx(p, 1e-15));
}

TEST(Pose, TranslationsAdd) {
  const Pose c = pose_compose(Pose::from_translation({0, 0, 1}), Pose::from_translation({0, 0, 2}));
  EXPECT_TRUE(c.is_approx(Pose::from_translation({0, 0, 3}), 0.0));
}

TEST(Pose, InverseExamples) {
  EXPECT_TRUE(pose_inverse(Pose::identity()).is_approx(Pose::identity(), 0.0));
  EXPECT_TRUE(pose_inverse(Pose::from_translation({1, 0, 0}))
                  .is_approx(Pose::from_translation({-1, 0, 0}), 0.0));
}

TEST(Pose, GroupLawsOnRandomPoses) {
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const Pose a = testing::random_pose(rng);
    const Pose b = testing::random_pose(rng);
    const Pose c = testing::random_pose(rng);
    EXPECT_TRUE(pose_compose(pose_compose(a, b), c).is_approx(pose_compose(a, pose_compose(b, c)), 1e-9));
    EXPECT_TRUE(pose_compose(a, pose_inverse(a)).is_approx(Pose::identity(), 1e-9));
    EXPECT_TRUE(pose_inverse(pose_inverse(a)).is_approx(a, 1e-12));
  }
}

TEST(Pose, ComposeAppliesRightOperandFirst) {
  Rng rng(3);
  const Pose a = testing::random_pose(rng);
  const Pose b = testing::random_pose(rng);
  const Eigen::Vector3d x(0.3, -1.2, 4.0);
  EXPECT_LT((pose_compose(a, b).apply(x) - a.apply(b.apply(x))).norm(), 1e-12);
}

TEST(Pose, RejectsNonRotations) {
  Eigen::Matrix3d scaled = 1.01 * Eigen::Matrix3d::Identity();
  EXPECT_THROW(Pose(scaled, Eigen::Vector3d::Zero()), InvalidArgument);
  Eigen::Matrix3d reflection = Eigen::Matrix3d::Identity();
  reflection(0, 0) = -1;
  EXPECT_THROW(Pose(reflection, Eigen::Vector3d::Zero()), InvalidArgument);
  EXPECT_THROW(Pose(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0, std::nan(""), 0)),
               InvalidArgument);
}

TEST(Pose, YawRotatesAboutVertical) {
  const Pose p = Pose::from_yaw(90.0);
  // +z (forward) turns into +x.
  EXPECT_LT((p.apply({0, 0, 1}) - Eigen::Vector3d(1, 0, 0)).norm(), 1e-12);
  EXPECT_LT((p.apply({0, 1, 0}) - Eigen::Vector3d(0, 1, 0)).norm(), 1e-12);
}

TEST(DepthImage, RejectsInvalidValues) {
  EXPECT_THROW(DepthImage(2, 1, {1.0f, -0.5f}), InvalidArgument);
  EXPECT_THROW(DepthImage(2, 1, {1.0f, std::numeric_limits<float>::quiet_NaN()}),
               InvalidArgument);
  EXPECT_THROW(DepthImage(2, 1, {std::numeric_limits<float>::infinity(), 1.0f}),
               InvalidArgument);
  EXPECT_THROW(DepthImage(2, 2, {1.0f}), InvalidArgument);
  EXPECT_THROW(DepthImage(0, 3), InvalidArgument);
}

TEST(DepthImage, ZeroIsUnknown) {
  const DepthImage img(3, 1, {0.0f, 1.5f, -0.0f});
  EXPECT_FALSE(img.known(0, 0));
  EXPECT_TRUE(img.known(1, 0));
  EXPECT_FALSE(img.known(2, 0));
  EXPECT_FALSE(std::signbit(img(2, 0)));
  EXPECT_EQ(img.known_count(), 1u);
}

TEST(PixelMask, ErodeRemovesBorderAndThinStructures) {
  PixelMask m(5, 5, std::vector<std::uint8_t>(25, 1));
  const PixelMask e = erode(m);
  EXPECT_EQ(e.count(), 9u);
  EXPECT_TRUE(e(2, 2));
  EXPECT_FALSE(e(0, 2));

  PixelMask line(7, 7);
  for (int x = 0; x < 7; ++x) line.set(x, 3);
  EXPECT_TRUE(erode(line).empty());
}

TEST(PixelMask, SetOperations) {
  PixelMask a(2, 2, {1, 1, 0, 0});
  PixelMask b(2, 2, {0, 1, 0, 1});
  EXPECT_EQ(subtract(a, b), PixelMask(2, 2, {1, 0, 0, 0}));
  EXPECT_EQ(intersect(a, b), PixelMask(2, 2, {0, 1, 0, 0}));
  EXPECT_THROW(subtract(a, PixelMask(1, 2)), InvalidArgument);
}

TEST(Random, UniformIntCoversRange) {
  Rng rng(5);
  std::array<int, 4> hits{};
  for (int i = 0; i < 4000; ++i) {
    const auto v = rng.uniform_int(3, 6);
    ASSERT_GE(v, 3);
    ASSERT_LE(v, 6);
    ++hits[static_cast<std::size_t>(v - 3)];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Random, StreamIsFixedByTheStandard) {
  // mt19937_64 seeded with 5489 yields 9981545732273789042 as its 10000th value.
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next();
  EXPECT_EQ(v, 9981545732273789042ull);
}

TEST(Random, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
  EXPECT_NE(derive_seed(7, 0), derive_seed(8, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

}  // namespace
}  // namespace dualwarp
