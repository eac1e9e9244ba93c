#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dualwarp {

/// Row-major grid of metric depths in meters. 0 encodes "unknown".
///
/// Values are validated at construction (finite, non-negative) and the
/// object is immutable afterwards; producers build a std::vector and hand
/// it over.
class DepthImage {
 public:
  /// All-unknown image.
  DepthImage(int width, int height);
  DepthImage(int width, int height, std::vector<float> data);

  static DepthImage filled(int width, int height, float depth);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  float operator()(int x, int y) const { return data_[index(x, y)]; }
  float at(std::size_t i) const { return data_[i]; }
  bool known(int x, int y) const { return (*this)(x, y) > 0.0f; }
  bool known(std::size_t i) const { return data_[i] > 0.0f; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::span<const float> data() const { return data_; }
  std::size_t known_count() const;

  friend bool operator==(const DepthImage&, const DepthImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<float> data_;
};

/// Boolean per-pixel annotation; houses the occlusion mask.
class PixelMask {
 public:
  PixelMask(int width, int height);
  PixelMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool operator()(int x, int y) const { return bits_[index(x, y)] != 0; }
  bool at(std::size_t i) const { return bits_[i] != 0; }
  void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }
  void set(std::size_t i, bool value = true) { bits_[i] = value ? 1 : 0; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool same_shape(const DepthImage& image) const {
    return image.width() == width_ && image.height() == height_;
  }

  friend bool operator==(const PixelMask&, const PixelMask&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;  // 0 or 1
};

/// Integer per-pixel source offsets: pixel (x, y) copies from (x+dx, y+dy).
class DisplacementField {
 public:
  DisplacementField(int width, int height);
  DisplacementField(int width, int height, std::vector<std::int32_t> dx,
                    std::vector<std::int32_t> dy);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return dx_.size(); }

  std::int32_t dx(std::size_t i) const { return dx_[i]; }
  std::int32_t dy(std::size_t i) const { return dy_[i]; }
  void set(std::size_t i, std::int32_t dx, std::int32_t dy) {
    dx_[i] = dx;
    dy_[i] = dy;
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  friend bool operator==(const DisplacementField&, const DisplacementField&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::int32_t> dx_;
  std::vector<std::int32_t> dy_;
};

/// 8-bit interleaved RGB image, used by the RGB-D variant of the pipeline.
class RgbImage {
 public:
  using Pixel = std::array<std::uint8_t, 3>;

  RgbImage(int width, int height);
  RgbImage(int width, int height, std::vector<std::uint8_t> interleaved);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return static_cast<std::size_t>(width_) * height_; }

  Pixel at(std::size_t i) const { return {data_[3 * i], data_[3 * i + 1], data_[3 * i + 2]}; }
  void set(std::size_t i, Pixel p) {
    data_[3 * i] = p[0];
    data_[3 * i + 1] = p[1];
    data_[3 * i + 2] = p[2];
  }
  std::span<const std::uint8_t> data() const { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Pixels known in `image`.
PixelMask known_mask(const DepthImage& image);

/// 1-pixel erosion with a 3x3 structuring element. Out-of-frame neighbours
/// count as clear, so border pixels are always removed.
PixelMask erode(const PixelMask& mask);

/// a AND NOT b.
PixelMask subtract(const PixelMask& a, const PixelMask& b);

/// a AND b.
PixelMask intersect(const PixelMask& a, const PixelMask& b);

}  // namespace dualwarp
