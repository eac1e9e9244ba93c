#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dualwarp/image.hpp"

namespace dualwarp {

struct ErrorStats {
  double mean = 0.0;
  double median = 0.0;
  std::size_t count = 0;     // mask pixels known in both pred and truth
  std::size_t excluded = 0;  // mask pixels known in truth but unknown in pred
};

/// Absolute depth errors over the mask. Pixels the prediction left unknown
/// are excluded and counted; pixels unknown in the truth are ignored. The
/// median of an even count is the mean of the two middle values. With no
/// scored pixel, mean and median are NaN. Throws InvalidArgument on an empty
/// mask or mismatched sizes.
ErrorStats masked_errors(const DepthImage& pred, const DepthImage& truth, const PixelMask& mask);

/// 10 log10(255^2 / MSE) over mask pixels and all three channels; +inf when
/// the images agree on the mask.
double psnr(const RgbImage& pred, const RgbImage& truth, const PixelMask& mask);

/// Which image the content loss compares against the truth's features.
enum class ContentSource { Prediction, OccludedInput };

struct LossConfig {
  double lambda = 1e-3;  // total variation weight
  double gamma = 1e-5;   // content weight
  std::vector<int> feature_scales{4, 8};
  ContentSource content_source = ContentSource::Prediction;
};

/// One pooled feature map.
struct FeatureGrid {
  int scale;
  int width;   // ceil(W / scale)
  int height;  // ceil(H / scale)
  std::vector<double> values;
};

/// Gradient-magnitude maps sqrt(gx^2 + gy^2) (forward differences, backward
/// in the last row/column) average-pooled over scale x scale cells. Cells cut
/// by the image border average over the pixels they contain.
struct FeaturePyramid {
  std::vector<FeatureGrid> levels;
};

FeaturePyramid feature_pyramid(const DepthImage& image, const std::vector<int>& scales);

/// sum over mask pixels of |truth - pred| + lambda (|gx| + |gy|), gradients of
/// the prediction as in feature_pyramid.
double loss_tv(const DepthImage& pred, const DepthImage& truth, const PixelMask& mask,
               const LossConfig& cfg = {});

/// gamma * sum over scales and masked cells of |phi(truth) - phi(compared)|.
/// A cell is masked if any of its pixels is.
double loss_content(const DepthImage& compared, const DepthImage& truth, const PixelMask& mask,
                    const LossConfig& cfg = {});

/// loss_tv + loss_content. The content term uses `pred` or `occluded`
/// according to cfg.content_source.
double total_loss(const DepthImage& pred, const DepthImage& truth, const DepthImage& occluded,
                  const PixelMask& mask, const LossConfig& cfg = {});

struct MetricsReport {
  ErrorStats errors;
  double loss_tv = 0.0;
  double loss_content = 0.0;
  double loss_total = 0.0;
  std::optional<double> psnr;
};

}  // namespace dualwarp
