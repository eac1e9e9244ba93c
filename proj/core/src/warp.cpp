#include "dualwarp/warp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dualwarp/errors.hpp"

namespace dualwarp {
namespace {

constexpr float kEmpty = std::numeric_limits<float>::infinity();
constexpr double kNoStep = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kNoSource = std::numeric_limits<std::uint32_t>::max();

// Splatted z-buffer. `origin` holds, per cell, the index of the input image
// pixel the winning point descends from, so attributes can be carried along.
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<float> depth;  // kEmpty where nothing landed
  std::vector<std::uint32_t> origin;
};

// Splats a depth grid into the view related by `pose`. The source is
// upsampled by `up` (nearest-neighbour replication) and the target grid has
// the upsampled size, with intrinsics k scaled by `up`. Source cells are
// visited in row-major order of the upsampled grid and a strictly smaller
// depth is needed to replace an earlier writer.
Grid splat_grid(std::span<const float> depth, std::span<const std::uint32_t> origin, int w,
                int h, const CameraIntrinsics& k, int up, const Pose& pose) {
  const int hw = w * up;
  const int hh = h * up;
  const CameraIntrinsics hk = intrinsics_scale(k, up);

  const Eigen::Matrix3d& r = pose.rotation();
  const Eigen::Vector3d& t = pose.translation();
  const Eigen::Vector3d r0 = r.col(0);
  const Eigen::Vector3d r1 = r.col(1);
  const Eigen::Vector3d r2 = r.col(2);
  const double inv_f = 1.0 / hk.f;

  Grid out;
  out.width = hw;
  out.height = hh;
  const std::size_t hn = static_cast<std::size_t>(hw) * static_cast<std::size_t>(hh);
  out.depth.assign(hn, kEmpty);
  out.origin.assign(hn, kNoSource);

  for (int v = 0; v < hh; ++v) {
    const int sy = v / up;
    const double b = (static_cast<double>(v) - hk.cy) * inv_f;
    const Eigen::Vector3d row_dir = b * r1 + r2;
    for (int u = 0; u < hw; ++u) {
      const int sx = u / up;
      const std::size_t si = static_cast<std::size_t>(sy) * static_cast<std::size_t>(w) +
                             static_cast<std::size_t>(sx);
      const float s = depth[si];
      if (!(s > 0.0f && s < kEmpty)) continue;
      const double a = (static_cast<double>(u) - hk.cx) * inv_f;
      const Eigen::Vector3d p = static_cast<double>(s) * (a * r0 + row_dir) + t;
      if (!(p.z() > 0.0)) continue;
      const double fx = std::floor(hk.f * p.x() / p.z() + hk.cx + 0.5);
      const double fy = std::floor(hk.f * p.y() / p.z() + hk.cy + 0.5);
      if (!(fx >= 0.0 && fx < static_cast<double>(hw) && fy >= 0.0 &&
            fy < static_cast<double>(hh))) {
        continue;
      }
      const float z = static_cast<float>(p.z());
      if (!(z > 0.0f) || !std::isfinite(z)) continue;
      const std::size_t ti = static_cast<std::size_t>(fy) * static_cast<std::size_t>(hw) +
                             static_cast<std::size_t>(fx);
      if (z < out.depth[ti]) {
        out.depth[ti] = z;
        out.origin[ti] = origin.empty() ? static_cast<std::uint32_t>(si) : origin[si];
      }
    }
  }
  return out;
}

Grid splat_image(const DepthImage& src, const CameraIntrinsics& k, int up, const Pose& pose) {
  return splat_grid(src.data(), {}, src.width(), src.height(), k, up, pose);
}

// Min-depth pooling over factor x factor blocks; the first minimum in
// row-major block order wins.
Grid pool(const Grid& g, int factor) {
  if (factor == 1) return g;
  Grid out;
  out.width = g.width / factor;
  out.height = g.height / factor;
  const std::size_t n = static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height);
  out.depth.assign(n, kEmpty);
  out.origin.assign(n, kNoSource);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const std::size_t li = static_cast<std::size_t>(y) * static_cast<std::size_t>(out.width) +
                             static_cast<std::size_t>(x);
      for (int j = 0; j < factor; ++j) {
        const std::size_t row =
            static_cast<std::size_t>(y * factor + j) * static_cast<std::size_t>(g.width);
        for (int i = 0; i < factor; ++i) {
          const std::size_t hi = row + static_cast<std::size_t>(x * factor + i);
          if (g.depth[hi] < out.depth[li]) {
            out.depth[li] = g.depth[hi];
            out.origin[li] = g.origin[hi];
          }
        }
      }
    }
  }
  return out;
}

DepthImage to_image(const Grid& g) {
  std::vector<float> d(g.depth.size(), 0.0f);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (g.depth[i] < kEmpty) d[i] = g.depth[i];
  }
  return DepthImage(g.width, g.height, std::move(d));
}

void require_supersample(const WarpConfig& cfg) {
  if (cfg.supersample < 1) throw InvalidArgument("supersample must be >= 1");
}

// Forth and back. The intermediate view is kept on the supersampled grid
// when cfg.highres_intermediate is set.
Grid round_trip(const DepthImage& original, const CameraIntrinsics& k, const Pose& pose,
                const WarpConfig& cfg) {
  require_supersample(cfg);
  const int ss = cfg.supersample;
  const Grid there = splat_image(original, k, ss, pose);
  if (cfg.highres_intermediate) {
    const Grid back = splat_grid(there.depth, there.origin, there.width, there.height,
                                 intrinsics_scale(k, ss), 1, pose_inverse(pose));
    return pool(back, ss);
  }
  const Grid there_lo = pool(there, ss);
  const Grid back = splat_grid(there_lo.depth, there_lo.origin, there_lo.width, there_lo.height,
                               k, ss, pose_inverse(pose));
  return pool(back, ss);
}

RgbImage gather_color(const RgbImage& color, const std::vector<std::uint32_t>& source) {
  RgbImage out(color.width(), color.height());
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] != kNoSource) out.set(i, color.at(source[i]));
  }
  return out;
}

void require_rgbd_shape(const RgbdImage& img) {
  if (img.color.width() != img.depth.width() || img.color.height() != img.depth.height()) {
    throw InvalidArgument("colour and depth dimensions differ");
  }
}

// Keeps the pixels of `round_trip` that reproduce `original` and returns
// them with the original's exact depth, plus the occlusion mask.
DualWarpResult restrict_to_original(const DepthImage& original, const DepthImage& round_trip,
                                    const CameraIntrinsics& k, const Pose& pose,
                                    const WarpConfig& cfg) {
  const int w = original.width();
  const int h = original.height();
  std::vector<float> occluded(original.size(), 0.0f);
  PixelMask mask(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = original.index(x, y);
      if (!original.known(i)) continue;
      const float r = round_trip.at(i);
      if (r > 0.0f && depth_consistent(original, x, y, r, k, pose, cfg)) {
        occluded[i] = original.at(i);
      } else {
        mask.set(i);
      }
    }
  }
  return {DepthImage(w, h, std::move(occluded)), std::move(mask)};
}

}  // namespace

double local_depth_step(const DepthImage& image, int x, int y) {
  const double d = image(x, y);
  auto side = [&](int nx, int ny) {
    if (nx < 0 || ny < 0 || nx >= image.width() || ny >= image.height()) return kNoStep;
    const float v = image(nx, ny);
    return v > 0.0f ? std::abs(static_cast<double>(v) - d) : kNoStep;
  };
  auto axis = [](double a, double b) {
    const double m = std::min(a, b);
    return m == kNoStep ? 0.0 : m;
  };
  return std::max(axis(side(x - 1, y), side(x + 1, y)), axis(side(x, y - 1), side(x, y + 1)));
}

double rotation_sine(const Pose& pose) {
  const double c = std::clamp((pose.rotation().trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::sqrt(1.0 - c * c);
}

bool depth_consistent(const DepthImage& reference, int x, int y, float candidate,
                      const CameraIntrinsics& k, const Pose& pose, const WarpConfig& cfg) {
  const double ref = reference(x, y);
  const double per_pixel = local_depth_step(reference, x, y) + ref * rotation_sine(pose) / k.f;
  const double tol = cfg.consistency_tol + cfg.quantization_px * per_pixel;
  return std::abs(static_cast<double>(candidate) - ref) <= tol;
}

Projection project_pixel(double x, double y, double s, const CameraIntrinsics& k,
                         const Pose& pose) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("project_pixel: depth must be > 0");
  const Eigen::Vector3d ray((x - k.cx) / k.f, (y - k.cy) / k.f, 1.0);
  const Eigen::Vector3d p = pose.apply(s * ray);
  if (!(p.z() > 0.0)) return {0.0, 0.0, p.z(), false};
  return {k.f * p.x() / p.z() + k.cx, k.f * p.y() / p.z() + k.cy, p.z(), true};
}

DepthImage warp_depth(const DepthImage& src, const CameraIntrinsics& k, const Pose& pose,
                      const WarpConfig& cfg) {
  require_supersample(cfg);
  return to_image(pool(splat_image(src, k, cfg.supersample, pose), cfg.supersample));
}

RgbdImage warp_rgbd(const RgbdImage& src, const CameraIntrinsics& k, const Pose& pose,
                    const WarpConfig& cfg) {
  require_rgbd_shape(src);
  require_supersample(cfg);
  const Grid g = pool(splat_image(src.depth, k, cfg.supersample, pose), cfg.supersample);
  return {to_image(g), gather_color(src.color, g.origin)};
}

DualWarpResult dual_warp(const DepthImage& original, const CameraIntrinsics& k, const Pose& pose,
                         const WarpConfig& cfg) {
  const Grid back = round_trip(original, k, pose, cfg);
  return restrict_to_original(original, to_image(back), k, pose, cfg);
}

RgbdDualWarpResult dual_warp_rgbd(const RgbdImage& original, const CameraIntrinsics& k,
                                  const Pose& pose, const WarpConfig& cfg) {
  require_rgbd_shape(original);
  const Grid back = round_trip(original.depth, k, pose, cfg);
  DualWarpResult d = restrict_to_original(original.depth, to_image(back), k, pose, cfg);
  RgbImage color(original.color.width(), original.color.height());
  for (std::size_t i = 0; i < d.occluded.size(); ++i) {
    if (d.occluded.known(i)) color.set(i, original.color.at(i));
  }
  return {{std::move(d.occluded), std::move(color)}, std::move(d.mask)};
}

}  // namespace dualwarp
