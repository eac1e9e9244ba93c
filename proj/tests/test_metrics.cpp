#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dualwarp/errors.hpp"
#include "dualwarp/metrics.hpp"
#include "support.hpp"

namespace dualwarp {
namespace {

PixelMask full(int w, int h) { return PixelMask(w, h, std::vector<std::uint8_t>(w * h, 1)); }

TEST(MaskedErrors, ZeroForEqualImages) {
  Rng rng(1);
  const DepthImage img = testing::random_depth(rng, 10, 10, 0.0);
  const ErrorStats s = masked_errors(img, img, full(10, 10));
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(s.median, 0.0);
  EXPECT_EQ(s.count, 100u);
}

TEST(MaskedErrors, ThreePixels) {
  const DepthImage truth(3, 1, {1.0f, 1.0f, 1.0f});
  const DepthImage pred(3, 1, {1.25f, 0.5f, 1.75f});  // errors 0.25, 0.5, 0.75
  const ErrorStats s = masked_errors(pred, truth, full(3, 1));
  EXPECT_NEAR(s.mean, 0.5, 1e-12);
  EXPECT_NEAR(s.median, 0.5, 1e-12);
  EXPECT_EQ(s.count, 3u);
}

TEST(MaskedErrors, ListedExample) {
  const DepthImage truth(3, 1, {2.0f, 2.0f, 2.0f});
  const DepthImage pred(3, 1, {2.1f, 1.8f, 2.9f});
  const ErrorStats s = masked_errors(pred, truth, full(3, 1));
  const double e0 = std::abs(double{2.1f} - 2.0);
  const double e1 = std::abs(double{1.8f} - 2.0);
  const double e2 = std::abs(double{2.9f} - 2.0);
  EXPECT_NEAR(s.mean, (e0 + e1 + e2) / 3.0, 1e-12);
  EXPECT_NEAR(s.mean, 0.4, 1e-6);
  EXPECT_NEAR(s.median, e1, 1e-12);
}

TEST(MaskedErrors, UnknownPredictionsAreExcludedAndCounted) {
  const DepthImage truth(4, 1, {1, 1, 1, 0});
  const DepthImage pred(4, 1, {1.5f, 0.0f, 1.0f, 3.0f});
  const ErrorStats s = masked_errors(pred, truth, full(4, 1));
  EXPECT_EQ(s.count, 2u);
  EXPECT_EQ(s.excluded, 1u);
  EXPECT_NEAR(s.mean, 0.25, 1e-12);
  EXPECT_NEAR(s.median, 0.25, 1e-12);  // even count: mean of the middle pair
}

TEST(MaskedErrors, RejectsEmptyMask) {
  const DepthImage img(2, 2);
  EXPECT_THROW(masked_errors(img, img, PixelMask(2, 2)), InvalidArgument);
  EXPECT_THROW(masked_errors(img, DepthImage(3, 2), full(2, 2)), InvalidArgument);
}

TEST(MaskedErrors, MedianIgnoresPixelOrder) {
  Rng rng(2);
  const DepthImage truth = testing::random_depth(rng, 16, 16, 0.0);
  const DepthImage pred = testing::random_depth(rng, 16, 16, 0.0);
  // Reverse both images: same error multiset, new locations.
  std::vector<float> t(truth.data().rbegin(), truth.data().rend());
  std::vector<float> p(pred.data().rbegin(), pred.data().rend());
  const ErrorStats a = masked_errors(pred, truth, full(16, 16));
  const ErrorStats b = masked_errors(DepthImage(16, 16, p), DepthImage(16, 16, t), full(16, 16));
  EXPECT_EQ(a.median, b.median);
  EXPECT_NEAR(a.mean, b.mean, 1e-12);
}

TEST(Psnr, IdenticalIsInfinite) {
  const RgbImage img(4, 4, std::vector<std::uint8_t>(48, 77));
  EXPECT_TRUE(std::isinf(psnr(img, img, full(4, 4))));
}

TEST(Psnr, UnitErrorEverywhere) {
  const RgbImage a(4, 4, std::vector<std::uint8_t>(48, 100));
  const RgbImage b(4, 4, std::vector<std::uint8_t>(48, 101));
  EXPECT_NEAR(psnr(a, b, full(4, 4)), 20.0 * std::log10(255.0), 1e-9);
  EXPECT_NEAR(psnr(a, b, full(4, 4)), 48.13, 0.005);
}

TEST(Psnr, ThreePixels) {
  // Squared errors per pixel over 3 channels: (4+0+0), (0+1+0), (0+0+16); MSE = 21/9.
  const RgbImage a(3, 1, {10, 10, 10, 20, 20, 20, 30, 30, 30});
  const RgbImage b(3, 1, {12, 10, 10, 20, 21, 20, 30, 30, 34});
  const double expected = 10.0 * std::log10(255.0 * 255.0 / (21.0 / 9.0));
  EXPECT_NEAR(psnr(a, b, full(3, 1)), expected, 1e-9 * expected);
  EXPECT_THROW(psnr(a, b, PixelMask(3, 1)), InvalidArgument);
}

TEST(Psnr, DecreasesAsErrorGrows) {
  const RgbImage truth(8, 8, std::vector<std::uint8_t>(192, 128));
  double last = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> p(192, 128);
  for (int step = 0; step < 20; ++step) {
    p[static_cast<std::size_t>(step * 7 % 192)] += 5;
    const double v = psnr(RgbImage(8, 8, p), truth, full(8, 8));
    EXPECT_LT(v, last);
    last = v;
  }
}

TEST(LossTv, EqualImagesGiveGradientTermOnly) {
  const DepthImage img(3, 1, {1.0f, 1.5f, 3.0f});
  LossConfig cfg;
  // Forward differences 0.5, 1.5 and backward 1.5 at the border.
  EXPECT_NEAR(loss_tv(img, img, full(3, 1), cfg), 1e-3 * (0.5 + 1.5 + 1.5), 1e-12);
}

TEST(LossTv, ConstantOffset) {
  const DepthImage truth = DepthImage::filled(5, 4, 2.0f);
  const DepthImage pred = DepthImage::filled(5, 4, 2.5f);
  EXPECT_NEAR(loss_tv(pred, truth, full(5, 4)), 20 * 0.5, 1e-12);
}

TEST(LossTv, SinglePixel) {
  // Mask pixel (0,0): pred 1.0, right neighbour 1.25 (dx = 0.25 in binary
  // exact form), lower neighbour 0.75; truth 1.125.
  const DepthImage pred(2, 2, {1.0f, 1.25f, 0.75f, 2.0f});
  const DepthImage truth(2, 2, {1.125f, 0.0f, 0.0f, 0.0f});
  PixelMask mask(2, 2);
  mask.set(0, 0);
  EXPECT_NEAR(loss_tv(pred, truth, mask), 0.125 + 1e-3 * (0.25 + 0.25), 1e-15);
}

TEST(LossTv, DataTermIsHomogeneousInTheOffset) {
  const DepthImage truth = DepthImage::filled(6, 6, 3.0f);
  const PixelMask mask = full(6, 6);
  LossConfig cfg;
  cfg.lambda = 0;
  const double base = loss_tv(DepthImage::filled(6, 6, 3.25f), truth, mask, cfg);
  for (double c : {0.0, 0.5, 2.0, 4.0}) {
    const auto pred = DepthImage::filled(6, 6, static_cast<float>(3.0 + 0.25 * c));
    EXPECT_NEAR(loss_tv(pred, truth, mask, cfg), c * base, 1e-9);
  }
}

// Gradient magnitude pooled over s x s cells, written out directly.
double brute_feature(const DepthImage& img, int s, int cx, int cy) {
  auto g = [&](int x, int y) {
    const int w = img.width(), h = img.height();
    auto at = [&](int u, int v) { return static_cast<double>(img(u, v)); };
    const double gx = w == 1 ? 0.0 : x + 1 < w ? at(x + 1, y) - at(x, y) : at(x, y) - at(x - 1, y);
    const double gy = h == 1 ? 0.0 : y + 1 < h ? at(x, y + 1) - at(x, y) : at(x, y) - at(x, y - 1);
    return std::sqrt(gx * gx + gy * gy);
  };
  double sum = 0;
  int n = 0;
  for (int y = cy * s; y < std::min(img.height(), cy * s + s); ++y) {
    for (int x = cx * s; x < std::min(img.width(), cx * s + s); ++x) {
      sum += g(x, y);
      ++n;
    }
  }
  return sum / n;
}

TEST(FeaturePyramid, MatchesDirectEvaluation) {
  Rng rng(5);
  const DepthImage img = testing::random_depth(rng, 19, 13, 0.2);
  const FeaturePyramid p = feature_pyramid(img, {4, 8});
  ASSERT_EQ(p.levels.size(), 2u);
  EXPECT_EQ(p.levels[0].width, 5);
  EXPECT_EQ(p.levels[0].height, 4);
  EXPECT_EQ(p.levels[1].width, 3);
  EXPECT_EQ(p.levels[1].height, 2);
  for (const auto& level : p.levels) {
    for (int cy = 0; cy < level.height; ++cy) {
      for (int cx = 0; cx < level.width; ++cx) {
        EXPECT_NEAR(level.values[cy * level.width + cx], brute_feature(img, level.scale, cx, cy),
                    1e-12);
      }
    }
  }
}

TEST(LossContent, ZeroCases) {
  Rng rng(6);
  const DepthImage a = testing::random_depth(rng, 16, 16);
  const DepthImage b = testing::random_depth(rng, 16, 16);
  EXPECT_EQ(loss_content(a, a, full(16, 16)), 0.0);
  LossConfig cfg;
  cfg.gamma = 0;
  EXPECT_EQ(loss_content(a, b, full(16, 16), cfg), 0.0);
}

TEST(LossContent, StepEdgeAgainstSmoothedEdge) {
  // Truth: step from 1 to 3 between columns 7 and 8. Prediction: the same
  // step spread linearly over columns 6..9.
  const int w = 16, h = 8;
  std::vector<float> t(w * h), p(w * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      t[y * w + x] = x < 8 ? 1.0f : 3.0f;
      p[y * w + x] = x <= 6 ? 1.0f : x >= 9 ? 3.0f : 1.0f + 2.0f * (x - 6) / 3.0f;
    }
  }
  const DepthImage truth(w, h, t), pred(w, h, p);
  PixelMask mask(w, h);
  mask.set(9, 2);  // one pixel: cells (2,0) at scale 4 and (1,0) at scale 8
  double expected = 0;
  expected += std::abs(brute_feature(truth, 4, 2, 0) - brute_feature(pred, 4, 2, 0));
  expected += std::abs(brute_feature(truth, 8, 1, 0) - brute_feature(pred, 8, 1, 0));
  expected *= 1e-5;
  const double got = loss_content(pred, truth, mask);
  EXPECT_GT(got, 0.0);
  EXPECT_NEAR(got, expected, 1e-9 * expected);
}

TEST(TotalLoss, SwitchSelectsComparedImage) {
  Rng rng(7);
  const DepthImage truth = testing::random_depth(rng, 12, 12, 0.0);
  const DepthImage pred = testing::random_depth(rng, 12, 12, 0.0);
  const DepthImage occluded = testing::random_depth(rng, 12, 12, 0.5);
  const PixelMask mask = testing::random_mask(rng, 12, 12);
  LossConfig cfg;
  EXPECT_NEAR(total_loss(pred, truth, occluded, mask, cfg),
              loss_tv(pred, truth, mask, cfg) + loss_content(pred, truth, mask, cfg), 1e-12);
  cfg.content_source = ContentSource::OccludedInput;
  EXPECT_NEAR(total_loss(pred, truth, occluded, mask, cfg),
              loss_tv(pred, truth, mask, cfg) + loss_content(occluded, truth, mask, cfg), 1e-12);
  EXPECT_EQ(total_loss(truth, truth, truth, mask, cfg), loss_tv(truth, truth, mask, cfg));
}

}  // namespace
}  // namespace dualwarp
