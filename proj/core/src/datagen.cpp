#include "dualwarp/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <system_error>

#include "dualwarp/errors.hpp"
#include "dualwarp/parallel.hpp"
#include "dualwarp/random.hpp"

namespace dualwarp {
namespace {

Pose draw_pose(Rng& rng, const PoseSamplerConfig& cfg) {
  const double t = cfg.translation_range;
  const double tx = rng.uniform(-t, t);
  const double tz = rng.uniform(-t, t);
  const double yaw = rng.uniform(-cfg.yaw_range, cfg.yaw_range);
  return Pose::from_yaw(yaw, Eigen::Vector3d(tx, 0.0, tz));
}

void check(const PoseSamplerConfig& cfg) {
  if (!(cfg.translation_range >= 0.0) || !(cfg.yaw_range >= 0.0)) {
    throw InvalidArgument("pose ranges must be non-negative");
  }
}

void check(const BlockRemovalConfig& cfg) {
  if (!(cfg.max_removed_fraction > 0.0 && cfg.max_removed_fraction <= 1.0)) {
    throw InvalidArgument("max_removed_fraction must lie in (0, 1]");
  }
  if (cfg.block_min < 1 || cfg.block_min > cfg.block_max) {
    throw InvalidArgument("block side range must satisfy 1 <= min <= max");
  }
}

std::string name_of(std::size_t image) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu", image);
  return buf;
}

std::string name_of(std::size_t image, std::size_t pair) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%05zu_%03zu", image, pair);
  return buf;
}

void make_dirs(const std::filesystem::path& out_dir) {
  std::error_code ec;
  for (const char* sub : {"complete", "pairs"}) {
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }
}

DepthImage zero_where(const DepthImage& image, const PixelMask& removed) {
  std::vector<float> data(image.data().begin(), image.data().end());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (removed.at(i)) data[i] = 0.0f;
  }
  return DepthImage(image.width(), image.height(), std::move(data));
}

template <typename MakePair>
GenerationResult generate(const std::vector<DepthImage>& images, int pairs_per_image,
                          const std::filesystem::path& out_dir, int jobs, const char* strategy,
                          std::uint64_t seed, MakePair make_pair) {
  if (pairs_per_image < 0) throw InvalidArgument("pairs per image must be non-negative");
  make_dirs(out_dir);
  parallel_for(images.size(), jobs, [&](std::size_t i) {
    write_depth_raw(out_dir / "complete" / (name_of(i) + ".dpm"), images[i]);
  });

  const auto per_image = static_cast<std::size_t>(pairs_per_image);
  const std::size_t total = images.size() * per_image;
  std::vector<std::optional<ManifestEntry>> entries(total);
  parallel_for(total, jobs, [&](std::size_t n) {
    const std::size_t i = n / per_image;
    const std::size_t p = n % per_image;
    const std::uint64_t s = entry_seed(seed, i, p);
    const TrainingPair pair = make_pair(images[i], s);
    if (pair.occluded.known_count() == 0) return;
    const std::string stem = "pairs/" + name_of(i, p);
    ManifestEntry e{"complete/" + name_of(i) + ".dpm",
                    stem + "_occluded.dpm",
                    stem + "_mask.pgm",
                    pair.pose,
                    pair.intrinsics,
                    strategy,
                    s};
    write_depth_raw(out_dir / e.occluded, pair.occluded);
    write_mask(out_dir / e.mask, pair.mask);
    entries[n] = std::move(e);
  });

  GenerationResult result;
  for (std::size_t n = 0; n < total; ++n) {
    if (entries[n]) {
      result.manifest.entries.push_back(*entries[n]);
    } else {
      result.skipped.push_back({n / per_image, n % per_image, "no known pixel survives"});
    }
  }
  write_manifest(out_dir / "manifest.jsonl", result.manifest);
  return result;
}

}  // namespace

Pose sample_pose(const PoseSamplerConfig& cfg, std::uint64_t index) {
  check(cfg);
  Rng rng(derive_seed(cfg.seed, index));
  return draw_pose(rng, cfg);
}

PixelMask remove_blocks(int width, int height, const BlockRemovalConfig& cfg,
                        std::uint64_t stream_seed) {
  check(cfg);
  PixelMask removed(width, height);
  const auto area = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const auto budget =
      static_cast<std::size_t>(std::floor(cfg.max_removed_fraction * static_cast<double>(area)));
  Rng rng(stream_seed);
  std::size_t count = 0;
  std::vector<std::size_t> fresh;
  while (count < budget) {
    const auto bw = static_cast<int>(rng.uniform_int(cfg.block_min, cfg.block_max));
    const auto bh = static_cast<int>(rng.uniform_int(cfg.block_min, cfg.block_max));
    const auto x0 = static_cast<int>(rng.uniform_int(0, width - 1));
    const auto y0 = static_cast<int>(rng.uniform_int(0, height - 1));
    fresh.clear();
    for (int y = y0; y < std::min(height, y0 + bh); ++y) {
      for (int x = x0; x < std::min(width, x0 + bw); ++x) {
        if (!removed(x, y)) fresh.push_back(removed.index(x, y));
      }
    }
    if (count + fresh.size() > budget) break;
    for (std::size_t i : fresh) removed.set(i);
    count += fresh.size();
  }
  return removed;
}

std::uint64_t entry_seed(std::uint64_t seed, std::size_t image, std::size_t pair) {
  return derive_seed(derive_seed(seed, image), pair);
}

TrainingPair make_dual_pair(const DepthImage& image, const CameraIntrinsics& k,
                            const PoseSamplerConfig& pose_cfg, const WarpConfig& warp_cfg,
                            std::uint64_t stream_seed) {
  check(pose_cfg);
  Rng rng(stream_seed);
  const Pose pose = draw_pose(rng, pose_cfg);
  DualWarpResult dual = dual_warp(image, k, pose, warp_cfg);
  return {image, std::move(dual.occluded), std::move(dual.mask), pose, k};
}

TrainingPair make_block_pair(const DepthImage& image, const CameraIntrinsics& k,
                             const BlockRemovalConfig& cfg, std::uint64_t stream_seed) {
  const PixelMask removed = remove_blocks(image.width(), image.height(), cfg, stream_seed);
  DepthImage occluded = zero_where(image, removed);
  PixelMask mask = subtract(known_mask(image), known_mask(occluded));
  return {image, std::move(occluded), std::move(mask), Pose::identity(), k};
}

GenerationResult generate_strategy1(const std::vector<DepthImage>& images,
                                    const CameraIntrinsics& k, const PoseSamplerConfig& pose_cfg,
                                    const WarpConfig& warp_cfg, int pairs_per_image,
                                    const std::filesystem::path& out_dir, int jobs) {
  check(pose_cfg);
  return generate(images, pairs_per_image, out_dir, jobs, "dual", pose_cfg.seed,
                  [&](const DepthImage& image, std::uint64_t s) {
                    return make_dual_pair(image, k, pose_cfg, warp_cfg, s);
                  });
}

GenerationResult generate_strategy2(const std::vector<DepthImage>& images,
                                    const CameraIntrinsics& k, const BlockRemovalConfig& cfg,
                                    int pairs_per_image, const std::filesystem::path& out_dir,
                                    int jobs) {
  check(cfg);
  return generate(images, pairs_per_image, out_dir, jobs, "blocks", cfg.seed,
                  [&](const DepthImage& image, std::uint64_t s) {
                    return make_block_pair(image, k, cfg, s);
                  });
}

TrainingPair load_pair(const ManifestEntry& entry, const std::filesystem::path& root) {
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : root / path;
  };
  DepthImage complete = read_depth(resolve(entry.complete));
  DepthImage occluded = read_depth(resolve(entry.occluded));
  if (occluded.width() != complete.width() || occluded.height() != complete.height()) {
    throw FormatError(entry.occluded + ": dimensions differ from " + entry.complete);
  }
  PixelMask mask = read_mask(resolve(entry.mask), complete);
  return {std::move(complete), std::move(occluded), std::move(mask), entry.pose,
          entry.intrinsics};
}

CropWindow random_crop_window(int width, int height, int crop_width, int crop_height,
                              std::uint64_t seed) {
  if (crop_width < 1 || crop_height < 1 || crop_width > width || crop_height > height) {
    throw InvalidArgument("crop " + std::to_string(crop_width) + "x" +
                          std::to_string(crop_height) + " does not fit in " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  Rng rng(seed);
  const auto x0 = static_cast<int>(rng.uniform_int(0, width - crop_width));
  const auto y0 = static_cast<int>(rng.uniform_int(0, height - crop_height));
  return {x0, y0, crop_width, crop_height};
}

TrainingPair augment(const TrainingPair& pair, const CropWindow& window, bool flip) {
  const int w = pair.complete.width();
  const int h = pair.complete.height();
  if (window.width < 1 || window.height < 1 || window.x0 < 0 || window.y0 < 0 ||
      window.x0 + window.width > w || window.y0 + window.height > h) {
    throw InvalidArgument("crop window does not fit in the image");
  }
  const int cw = window.width;
  const int ch = window.height;
  auto source_x = [&](int x) { return window.x0 + (flip ? cw - 1 - x : x); };
  auto crop_depth = [&](const DepthImage& img) {
    std::vector<float> data(static_cast<std::size_t>(cw) * ch);
    for (int y = 0; y < ch; ++y) {
      for (int x = 0; x < cw; ++x) {
        data[static_cast<std::size_t>(y) * cw + x] = img(source_x(x), window.y0 + y);
      }
    }
    return DepthImage(cw, ch, std::move(data));
  };
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(cw) * ch);
  for (int y = 0; y < ch; ++y) {
    for (int x = 0; x < cw; ++x) {
      bits[static_cast<std::size_t>(y) * cw + x] = pair.mask(source_x(x), window.y0 + y);
    }
  }

  double cx = pair.intrinsics.cx - window.x0;
  const double cy = pair.intrinsics.cy - window.y0;
  Pose pose = pair.pose;
  if (flip) {
    cx = (cw - 1) - cx;
    const Eigen::Matrix3d s = Eigen::Vector3d(-1.0, 1.0, 1.0).asDiagonal();
    pose = Pose(s * pose.rotation() * s, s * pose.translation());
  }
  return {crop_depth(pair.complete), crop_depth(pair.occluded), PixelMask(cw, ch, std::move(bits)),
          pose, CameraIntrinsics(pair.intrinsics.f, cx, cy)};
}

TrainingPair augment(const TrainingPair& pair, int crop_width, int crop_height, bool flip,
                     std::uint64_t seed) {
  const CropWindow window = random_crop_window(pair.complete.width(), pair.complete.height(),
                                               crop_width, crop_height, seed);
  return augment(pair, window, flip);
}

}  // namespace dualwarp
