#include "dualwarp/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dualwarp/errors.hpp"

namespace dualwarp {
namespace {

std::size_t checked_area(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

void require_same_shape(const PixelMask& a, const PixelMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InvalidArgument("mask dimensions differ");
  }
}

}  // namespace

DepthImage::DepthImage(int width, int height)
    : width_(width), height_(height), data_(checked_area(width, height), 0.0f) {}

DepthImage::DepthImage(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != checked_area(width, height)) {
    throw InvalidArgument("depth data length does not match width*height");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const float v = data_[i];
    if (!std::isfinite(v) || v < 0.0f) {
      throw InvalidArgument("depth at index " + std::to_string(i) +
                            " is negative or non-finite");
    }
    // Normalise -0.0 so serialisation is bit-exact.
    if (v == 0.0f) data_[i] = 0.0f;
  }
}

DepthImage DepthImage::filled(int width, int height, float depth) {
  return DepthImage(width, height, std::vector<float>(checked_area(width, height), depth));
}

std::size_t DepthImage::known_count() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](float v) { return v > 0.0f; }));
}

PixelMask::PixelMask(int width, int height)
    : width_(width), height_(height), bits_(checked_area(width, height), 0) {}

PixelMask::PixelMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != checked_area(width, height)) {
    throw InvalidArgument("mask data length does not match width*height");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t PixelMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

DisplacementField::DisplacementField(int width, int height)
    : width_(width),
      height_(height),
      dx_(checked_area(width, height), 0),
      dy_(checked_area(width, height), 0) {}

DisplacementField::DisplacementField(int width, int height, std::vector<std::int32_t> dx,
                                     std::vector<std::int32_t> dy)
    : width_(width), height_(height), dx_(std::move(dx)), dy_(std::move(dy)) {
  const std::size_t n = checked_area(width, height);
  if (dx_.size() != n || dy_.size() != n) {
    throw InvalidArgument("displacement data length does not match width*height");
  }
}

RgbImage::RgbImage(int width, int height)
    : width_(width), height_(height), data_(3 * checked_area(width, height), 0) {}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> interleaved)
    : width_(width), height_(height), data_(std::move(interleaved)) {
  if (data_.size() != 3 * checked_area(width, height)) {
    throw InvalidArgument("rgb data length does not match 3*width*height");
  }
}

PixelMask known_mask(const DepthImage& image) {
  PixelMask mask(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image.known(i)) mask.set(i);
  }
  return mask;
}

PixelMask erode(const PixelMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  PixelMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      bool keep = true;
      for (int dy = -1; dy <= 1 && keep; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask(nx, ny)) {
            keep = false;
            break;
          }
        }
      }
      if (keep) out.set(x, y);
    }
  }
  return out;
}

PixelMask subtract(const PixelMask& a, const PixelMask& b) {
  require_same_shape(a, b);
  PixelMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.at(i) && !b.at(i)) out.set(i);
  }
  return out;
}

PixelMask intersect(const PixelMask& a, const PixelMask& b) {
  require_same_shape(a, b);
  PixelMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.at(i) && b.at(i)) out.set(i);
  }
  return out;
}

}  // namespace dualwarp
