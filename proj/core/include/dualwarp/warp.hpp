#pragma once

#include "dualwarp/camera.hpp"
#include "dualwarp/image.hpp"

namespace dualwarp {

enum class ZBufferTieRule { KeepNearest };
enum class OutOfFrame { Drop };

struct WarpConfig {
  /// Source and target are processed at `supersample` times the input
  /// resolution (nearest-neighbour replication, scaled intrinsics) and
  /// min-pooled back afterwards.
  int supersample = 2;
  ZBufferTieRule zbuffer_tie_rule = ZBufferTieRule::KeepNearest;
  OutOfFrame out_of_frame = OutOfFrame::Drop;
  /// Round-trip survival test. Splatting rounds every point to a pixel
  /// centre, so a point that comes back from the other view may have moved by
  /// up to about a pixel. On a slanted surface, or across a rotated view,
  /// that changes its depth. A pixel stays visible if its round-tripped depth
  /// is within
  ///   consistency_tol + quantization_px * (step + z * sin(angle) / f)
  /// of the original. Here step is local_depth_step and angle is the rotation
  /// angle of the pose.
  double consistency_tol = 1e-3;
  double quantization_px = 1.0;
  /// Dual warp only: keep the intermediate view on the supersampled grid
  /// instead of pooling it to the input resolution before warping back.
  bool highres_intermediate = true;
};

/// Continuous target coordinates of a reprojected pixel.
struct Projection {
  double x;
  double y;
  double depth;  // z in the target camera frame
  bool valid;    // false when the point ends up behind the target camera
};

/// Reprojects pixel (x, y) with depth s into the view related by `pose`:
/// s' x' = K (R K^-1 s x + T). Throws InvalidArgument for s <= 0.
Projection project_pixel(double x, double y, double s, const CameraIntrinsics& k,
                         const Pose& pose);

/// Forward-warps `src` into the view related by `pose` by z-buffered point
/// splatting. Each (supersampled) source point lands on the nearest target
/// pixel; collisions keep the smallest depth, exact ties keep the first
/// writer in row-major source order. Out-of-frame and behind-camera points
/// are dropped.
DepthImage warp_depth(const DepthImage& src, const CameraIntrinsics& k, const Pose& pose,
                      const WarpConfig& cfg = {});

struct RgbdImage {
  DepthImage depth;
  RgbImage color;
};

/// warp_depth that carries a colour per point; the colour follows the
/// z-buffer winner. Unknown output pixels are black.
RgbdImage warp_rgbd(const RgbdImage& src, const CameraIntrinsics& k, const Pose& pose,
                    const WarpConfig& cfg = {});

/// Local surface slope in meters per pixel: for each axis the smaller of the
/// two one-sided depth differences to known neighbours (so a depth
/// discontinuity on one side is ignored), maximised over both axes.
double local_depth_step(const DepthImage& image, int x, int y);

/// sin of the rotation angle of `pose`.
double rotation_sine(const Pose& pose);

/// The survival test described at WarpConfig, for `candidate` at pixel
/// (x, y) of `reference`, which must be known there. `pose` relates the
/// reference view and the intermediate view.
bool depth_consistent(const DepthImage& reference, int x, int y, float candidate,
                      const CameraIntrinsics& k, const Pose& pose, const WarpConfig& cfg);

struct DualWarpResult {
  DepthImage occluded;  // O~: the original's depth on the pixels that survive
  PixelMask mask;       // known in O, unknown in O~
};

/// Warps `original` to `pose` and back. The returned occluded image is
/// bit-identical to the original wherever it is known.
DualWarpResult dual_warp(const DepthImage& original, const CameraIntrinsics& k, const Pose& pose,
                         const WarpConfig& cfg = {});

struct RgbdDualWarpResult {
  RgbdImage occluded;
  PixelMask mask;
};

/// dual_warp on the depth channel; surviving pixels keep the original colour.
RgbdDualWarpResult dual_warp_rgbd(const RgbdImage& original, const CameraIntrinsics& k,
                                  const Pose& pose, const WarpConfig& cfg = {});

}  // namespace dualwarp
