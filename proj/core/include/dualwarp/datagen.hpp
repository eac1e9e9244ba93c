#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dualwarp/camera.hpp"
#include "dualwarp/image.hpp"
#include "dualwarp/io.hpp"
#include "dualwarp/warp.hpp"

namespace dualwarp {

struct PoseSamplerConfig {
  double translation_range = 1.0;  // +- meters along camera x and z
  double yaw_range = 15.0;         // +- degrees about camera y
  std::uint64_t seed = 0;
};

/// Pose number `index` of the stream: tx, tz and yaw (in that draw order)
/// uniform in their ranges from Rng(derive_seed(seed, index)); ty = 0.
Pose sample_pose(const PoseSamplerConfig& cfg, std::uint64_t index);

struct BlockRemovalConfig {
  double max_removed_fraction = 0.20;
  int block_min = 1;  // side length range in pixels, per axis
  int block_max = 50;
  std::uint64_t seed = 0;
};

/// Removes random rectangles until the next one would push the number of
/// removed pixels (overlaps counted once) above max_removed_fraction of the
/// frame. Each block draws width, height, x0, y0 in that order; blocks are
/// clipped at the frame. Returns the removed pixels.
PixelMask remove_blocks(int width, int height, const BlockRemovalConfig& cfg,
                        std::uint64_t stream_seed);

/// One (complete, occluded, mask) triple with the camera it was made for.
struct TrainingPair {
  DepthImage complete;
  DepthImage occluded;
  PixelMask mask;
  Pose pose;
  CameraIntrinsics intrinsics;
};

struct SkippedEntry {
  std::size_t image;
  std::size_t pair;
  std::string reason;
};

struct GenerationResult {
  DatasetManifest manifest;
  std::vector<SkippedEntry> skipped;
};

/// Output tree:
///   complete/IIIII.dpm          input image i
///   pairs/IIIII_PPP_occluded.dpm
///   pairs/IIIII_PPP_mask.pgm
///   manifest.jsonl              entries in (image, pair) order
/// Pair p of image i uses stream seed derive_seed(derive_seed(seed, i), p),
/// so any `jobs` value gives byte-identical files.
GenerationResult generate_strategy1(const std::vector<DepthImage>& images,
                                    const CameraIntrinsics& k, const PoseSamplerConfig& pose_cfg,
                                    const WarpConfig& warp_cfg, int pairs_per_image,
                                    const std::filesystem::path& out_dir, int jobs = 1);

/// Same layout as generate_strategy1 with block removal masks; poses are the
/// identity.
GenerationResult generate_strategy2(const std::vector<DepthImage>& images,
                                    const CameraIntrinsics& k, const BlockRemovalConfig& cfg,
                                    int pairs_per_image, const std::filesystem::path& out_dir,
                                    int jobs = 1);

/// Seed of pair `pair` of image `image`.
std::uint64_t entry_seed(std::uint64_t seed, std::size_t image, std::size_t pair);

/// The strategy-1 pair for one image and one stream seed. The occluded
/// image is empty when the dual warp keeps nothing.
TrainingPair make_dual_pair(const DepthImage& image, const CameraIntrinsics& k,
                            const PoseSamplerConfig& pose_cfg, const WarpConfig& warp_cfg,
                            std::uint64_t stream_seed);

TrainingPair make_block_pair(const DepthImage& image, const CameraIntrinsics& k,
                             const BlockRemovalConfig& cfg, std::uint64_t stream_seed);

/// Loads the triple referenced by a manifest entry; relative paths resolve
/// against `root`.
TrainingPair load_pair(const ManifestEntry& entry, const std::filesystem::path& root);

struct CropWindow {
  int x0;
  int y0;
  int width;
  int height;
};

/// Uniform crop window of the given size from Rng(seed).
CropWindow random_crop_window(int width, int height, int crop_width, int crop_height,
                              std::uint64_t seed);

/// Crops all three images to `window` and, if `flip`, mirrors the columns.
/// Intrinsics follow the crop and flip; a flip conjugates the pose with the
/// x mirror so it still describes the mirrored geometry. Throws
/// InvalidArgument if the window does not fit.
TrainingPair augment(const TrainingPair& pair, const CropWindow& window, bool flip);
TrainingPair augment(const TrainingPair& pair, int crop_width, int crop_height, bool flip,
                     std::uint64_t seed);

}  // namespace dualwarp
