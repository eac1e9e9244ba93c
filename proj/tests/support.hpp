#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Geometry>

#include "dualwarp/camera.hpp"
#include "dualwarp/image.hpp"
#include "dualwarp/random.hpp"

namespace dualwarp::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("dualwarp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Pose random_pose(Rng& rng, double max_angle_deg = 180.0, double max_t = 2.0) {
  Eigen::Vector3d axis(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  if (axis.norm() < 1e-6) axis = Eigen::Vector3d::UnitY();
  const double angle = rng.uniform(-max_angle_deg, max_angle_deg) * M_PI / 180.0;
  const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  const Eigen::Vector3d t(rng.uniform(-max_t, max_t), rng.uniform(-max_t, max_t),
                          rng.uniform(-max_t, max_t));
  return Pose(r, t);
}

// Depths in [lo, hi] with a fraction of unknown pixels.
inline DepthImage random_depth(Rng& rng, int w, int h, double unknown_fraction = 0.3,
                               double lo = 0.5, double hi = 10.0) {
  std::vector<float> data(static_cast<std::size_t>(w) * h);
  for (auto& v : data) {
    v = rng.uniform01() < unknown_fraction ? 0.0f : static_cast<float>(rng.uniform(lo, hi));
  }
  return DepthImage(w, h, std::move(data));
}

inline PixelMask random_mask(Rng& rng, int w, int h, double p = 0.3) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (auto& b : bits) b = rng.uniform01() < p ? 1 : 0;
  return PixelMask(w, h, std::move(bits));
}

// Image with the pixels of `mask` set to unknown.
inline DepthImage clear_masked(const DepthImage& img, const PixelMask& mask) {
  std::vector<float> data(img.data().begin(), img.data().end());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (mask.at(i)) data[i] = 0.0f;
  }
  return DepthImage(img.width(), img.height(), std::move(data));
}

}  // namespace dualwarp::testing
