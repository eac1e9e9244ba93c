#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dualwarp/camera.hpp"
#include "dualwarp/image.hpp"
#include "dualwarp/metrics.hpp"
#include "dualwarp/scene.hpp"

namespace dualwarp {

// All binary formats are little-endian. Readers throw FormatError on
// malformed content and IoError when the file cannot be opened; nothing is
// ever repaired.

// Raw depth, "DPM1": magic, u32 width, u32 height, then width*height f32
// meters row-major. 0 = unknown.
std::vector<std::uint8_t> encode_depth_raw(const DepthImage& image);
DepthImage decode_depth_raw(const std::vector<std::uint8_t>& bytes);
void write_depth_raw(const std::filesystem::path& path, const DepthImage& image);
DepthImage read_depth_raw(const std::filesystem::path& path);

/// 16-bit grayscale PNG storing round(depth * 1000 / scale); `scale` is
/// millimetres per unit. Depths that do not fit in 16 bits throw
/// InvalidArgument on write.
void write_depth_png16(const std::filesystem::path& path, const DepthImage& image,
                       double scale = 1.0);
DepthImage read_depth_png16(const std::filesystem::path& path, double scale = 1.0);

/// Picks the depth reader from the extension (.dpm or .png).
DepthImage read_depth(const std::filesystem::path& path);
void write_depth(const std::filesystem::path& path, const DepthImage& image);

/// Binary PGM (P5, maxval 255): 255 = masked, 0 = clear.
void write_mask(const std::filesystem::path& path, const PixelMask& mask);
PixelMask read_mask(const std::filesystem::path& path);
/// Also checks the mask against the image it annotates.
PixelMask read_mask(const std::filesystem::path& path, const DepthImage& companion);

// Displacement field, "DFL1": magic, u32 width, u32 height, then interleaved
// (dx, dy) as i16.
std::vector<std::uint8_t> encode_flow(const DisplacementField& field);
DisplacementField decode_flow(const std::vector<std::uint8_t>& bytes);
void write_flow(const std::filesystem::path& path, const DisplacementField& field);
DisplacementField read_flow(const std::filesystem::path& path);

/// Binary PPM (P6, maxval 255).
void write_rgb(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_rgb(const std::filesystem::path& path);

struct ManifestEntry {
  std::string complete;  // paths relative to the manifest's directory
  std::string occluded;
  std::string mask;
  Pose pose;
  CameraIntrinsics intrinsics{1.0, 0.0, 0.0};
  std::string strategy;  // "dual" or "blocks"
  std::uint64_t seed = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// JSON Lines, one object per entry with exactly the keys complete,
/// occluded, mask, pose (12 numbers, R row-major then T), intrinsics
/// (f, cx, cy), strategy and seed.
std::string manifest_to_text(const DatasetManifest& manifest);
DatasetManifest manifest_from_text(const std::string& text);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Metrics report document: {"mean", "median", "count", "excluded",
/// "loss_tv", "loss_content", "loss_total"[, "psnr"]}. NaN statistics are
/// written as null and an infinite PSNR as the string "inf".
std::string metrics_report_to_json(const MetricsReport& report);
/// Flat "key: value" lines in the same order.
std::string metrics_report_to_text(const MetricsReport& report);

void write_scene(const std::filesystem::path& path, const Scene& scene);
Scene read_scene(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace dualwarp
