#include "dualwarp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualwarp/errors.hpp"

namespace dualwarp {
namespace {

template <typename A, typename B>
void require_same_size(const A& a, const B& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InvalidArgument(std::string(what) + ": image dimensions differ");
  }
}

void require_nonempty(const PixelMask& mask, const char* what) {
  if (mask.empty()) throw InvalidArgument(std::string(what) + ": empty mask");
}

// Forward difference, backward on the last sample; 0 for a single sample.
double diff_x(const DepthImage& img, int x, int y) {
  const int w = img.width();
  if (w == 1) return 0.0;
  if (x + 1 < w) return double{img(x + 1, y)} - img(x, y);
  return double{img(x, y)} - img(x - 1, y);
}

double diff_y(const DepthImage& img, int x, int y) {
  const int h = img.height();
  if (h == 1) return 0.0;
  if (y + 1 < h) return double{img(x, y + 1)} - img(x, y);
  return double{img(x, y)} - img(x, y - 1);
}

}  // namespace

ErrorStats masked_errors(const DepthImage& pred, const DepthImage& truth, const PixelMask& mask) {
  require_same_size(pred, truth, "masked_errors");
  require_same_size(mask, truth, "masked_errors");
  require_nonempty(mask, "masked_errors");
  ErrorStats stats;
  std::vector<double> errors;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.at(i) || !truth.known(i)) continue;
    if (!pred.known(i)) {
      ++stats.excluded;
      continue;
    }
    errors.push_back(std::abs(double{pred.at(i)} - truth.at(i)));
  }
  stats.count = errors.size();
  if (errors.empty()) {
    stats.mean = stats.median = std::numeric_limits<double>::quiet_NaN();
    return stats;
  }
  double sum = 0.0;
  for (double e : errors) sum += e;
  stats.mean = sum / static_cast<double>(errors.size());
  std::sort(errors.begin(), errors.end());
  const std::size_t n = errors.size();
  stats.median = n % 2 ? errors[n / 2] : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
  return stats;
}

double psnr(const RgbImage& pred, const RgbImage& truth, const PixelMask& mask) {
  require_same_size(pred, truth, "psnr");
  require_same_size(mask, truth, "psnr");
  require_nonempty(mask, "psnr");
  double sse = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.at(i)) continue;
    const auto p = pred.at(i);
    const auto t = truth.at(i);
    for (int c = 0; c < 3; ++c) {
      const double d = static_cast<double>(p[c]) - t[c];
      sse += d * d;
    }
    n += 3;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(n);
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

FeaturePyramid feature_pyramid(const DepthImage& image, const std::vector<int>& scales) {
  const int w = image.width();
  const int h = image.height();
  std::vector<double> magnitude(image.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      magnitude[image.index(x, y)] = std::hypot(diff_x(image, x, y), diff_y(image, x, y));
    }
  }
  FeaturePyramid pyramid;
  for (int s : scales) {
    if (s < 1) throw InvalidArgument("feature scales must be >= 1");
    FeatureGrid grid{s, (w + s - 1) / s, (h + s - 1) / s, {}};
    grid.values.assign(static_cast<std::size_t>(grid.width) * grid.height, 0.0);
    for (int cy = 0; cy < grid.height; ++cy) {
      for (int cx = 0; cx < grid.width; ++cx) {
        double sum = 0.0;
        int n = 0;
        for (int y = cy * s; y < std::min(h, (cy + 1) * s); ++y) {
          for (int x = cx * s; x < std::min(w, (cx + 1) * s); ++x) {
            sum += magnitude[image.index(x, y)];
            ++n;
          }
        }
        grid.values[static_cast<std::size_t>(cy) * grid.width + cx] = sum / n;
      }
    }
    pyramid.levels.push_back(std::move(grid));
  }
  return pyramid;
}

double loss_tv(const DepthImage& pred, const DepthImage& truth, const PixelMask& mask,
               const LossConfig& cfg) {
  require_same_size(pred, truth, "loss_tv");
  require_same_size(mask, truth, "loss_tv");
  double data = 0.0;
  double smooth = 0.0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      data += std::abs(double{truth(x, y)} - pred(x, y));
      smooth += std::abs(diff_x(pred, x, y)) + std::abs(diff_y(pred, x, y));
    }
  }
  return data + cfg.lambda * smooth;
}

double loss_content(const DepthImage& compared, const DepthImage& truth, const PixelMask& mask,
                    const LossConfig& cfg) {
  require_same_size(compared, truth, "loss_content");
  require_same_size(mask, truth, "loss_content");
  if (cfg.gamma == 0.0) return 0.0;
  const FeaturePyramid a = feature_pyramid(truth, cfg.feature_scales);
  const FeaturePyramid b = feature_pyramid(compared, cfg.feature_scales);
  double sum = 0.0;
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    const FeatureGrid& ga = a.levels[l];
    const FeatureGrid& gb = b.levels[l];
    const int s = ga.scale;
    std::vector<std::uint8_t> cell_masked(ga.values.size(), 0);
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) {
        if (mask(x, y)) cell_masked[static_cast<std::size_t>(y / s) * ga.width + x / s] = 1;
      }
    }
    for (std::size_t c = 0; c < ga.values.size(); ++c) {
      if (cell_masked[c]) sum += std::abs(ga.values[c] - gb.values[c]);
    }
  }
  return cfg.gamma * sum;
}

double total_loss(const DepthImage& pred, const DepthImage& truth, const DepthImage& occluded,
                  const PixelMask& mask, const LossConfig& cfg) {
  const DepthImage& compared =
      cfg.content_source == ContentSource::Prediction ? pred : occluded;
  return loss_tv(pred, truth, mask, cfg) + loss_content(compared, truth, mask, cfg);
}

}  // namespace dualwarp
