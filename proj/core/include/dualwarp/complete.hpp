#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "dualwarp/camera.hpp"
#include "dualwarp/image.hpp"
#include "dualwarp/warp.hpp"

namespace dualwarp {

struct DisplacementResult {
  DepthImage depth;
  /// Row-major indices of mask pixels whose source pixel was itself unknown.
  std::vector<std::size_t> unresolved;
};

/// Copies occluded[x + dx, y + dy] into every mask pixel that is unknown in
/// `occluded`; all other pixels pass through unchanged. A source outside the
/// frame on such a pixel, or mismatched sizes, throws InvalidArgument.
DisplacementResult apply_displacement(const DepthImage& occluded, const PixelMask& mask,
                                      const DisplacementField& field);

/// For every mask pixel, the offset to the nearest known pixel in Euclidean
/// distance. Ties go to the smaller dy, then the smaller dx. Other pixels get
/// (0, 0). Throws NoValidSource when nothing is known.
DisplacementField nearest_valid_field(const DepthImage& occluded, const PixelMask& mask);

struct InpaintResult {
  DepthImage depth;
  int iterations = 0;
  /// Sizes of the 4-connected unknown regions without a known neighbour,
  /// which are left unknown.
  std::vector<std::size_t> unfilled_regions;
};

/// Harmonic fill: Jacobi iteration of the 4-neighbour Laplace equation on the
/// mask pixels that are unknown, with known pixels as fixed boundary values.
/// Neighbours outside the frame or unknown and unmasked are left out of the
/// average. Stops after `iterations` sweeps or once the largest update falls
/// below `tolerance`.
InpaintResult diffuse_inpaint(const DepthImage& occluded, const PixelMask& mask, int iterations,
                              double tolerance);

/// Fills the pixels left unresolved by apply_displacement by diffusion.
DepthImage fill_unresolved(const DisplacementResult& result, int iterations = 5000,
                           double tolerance = 1e-6);

/// Completion strategy used by fuse_views: fills `mask` in `occluded`.
using Completer = std::function<DepthImage(const DepthImage& occluded, const PixelMask& mask)>;

Completer nearest_completer();
Completer diffuse_completer(int iterations = 5000, double tolerance = 1e-6);

/// `count` poses drawn with the default pose sampler ranges.
std::vector<Pose> default_fusion_poses(std::uint64_t seed, int count = 8);

/// For every pose: warp `base` there, complete every unknown pixel of that
/// view with `completer`, warp back. The result is the lower median of all
/// known candidates per pixel, the base value included where known. Views
/// that receive no known pixel are skipped. The views run on up to `jobs`
/// threads; the result does not depend on `jobs` or on the order of `poses`.
DepthImage fuse_views(const DepthImage& base, const CameraIntrinsics& k,
                      const std::vector<Pose>& poses, const Completer& completer,
                      const WarpConfig& cfg = {}, int jobs = 1);

}  // namespace dualwarp
