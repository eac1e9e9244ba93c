#include "dualwarp/complete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "dualwarp/datagen.hpp"
#include "dualwarp/errors.hpp"
#include "dualwarp/parallel.hpp"

namespace dualwarp {
namespace {

void require_same_size(const DepthImage& image, const PixelMask& mask, const char* what) {
  if (!mask.same_shape(image)) {
    throw InvalidArgument(std::string(what) + ": mask and image dimensions differ");
  }
}

// Felzenszwalb-Huttenlocher 1-D squared distance transform of f, in place.
// v, z and d are scratch buffers of at least n, n + 1 and n entries. All
// inputs are small integers, so the arithmetic is exact.
void edt_1d(double* f, std::size_t stride, int n, std::vector<int>& v, std::vector<double>& z,
            std::vector<double>& d) {
  auto at = [&](int q) { return f[static_cast<std::size_t>(q) * stride]; };
  auto meet = [&](int q, int p) {
    return ((at(q) + double(q) * q) - (at(p) + double(p) * p)) / (2.0 * (q - p));
  };
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = meet(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = meet(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + at(v[k]);
  }
  for (int q = 0; q < n; ++q) f[static_cast<std::size_t>(q) * stride] = d[q];
}

// Exact squared distance from every pixel to the nearest known pixel.
std::vector<double> squared_distance_to_known(const DepthImage& image) {
  const int w = image.width();
  const int h = image.height();
  // Larger than any in-frame squared distance, small enough to stay exact.
  const double far = double(w) * w + double(h) * h + 1.0;
  std::vector<double> dist(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) dist[i] = image.known(i) ? 0.0 : far;
  const int n = std::max(w, h);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  std::vector<double> d(n);
  for (int x = 0; x < w; ++x) edt_1d(dist.data() + x, static_cast<std::size_t>(w), h, v, z, d);
  for (int y = 0; y < h; ++y) {
    edt_1d(dist.data() + static_cast<std::size_t>(y) * w, 1, w, v, z, d);
  }
  return dist;
}

}  // namespace

DisplacementResult apply_displacement(const DepthImage& occluded, const PixelMask& mask,
                                      const DisplacementField& field) {
  require_same_size(occluded, mask, "apply_displacement");
  if (field.width() != occluded.width() || field.height() != occluded.height()) {
    throw InvalidArgument("apply_displacement: field and image dimensions differ");
  }
  const int w = occluded.width();
  const int h = occluded.height();
  std::vector<float> out(occluded.data().begin(), occluded.data().end());
  DisplacementResult result{DepthImage(w, h), {}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = occluded.index(x, y);
      if (!mask.at(i) || occluded.known(i)) continue;
      const long sx = long{x} + field.dx(i);
      const long sy = long{y} + field.dy(i);
      if (sx < 0 || sy < 0 || sx >= w || sy >= h) {
        throw InvalidArgument("apply_displacement: pixel (" + std::to_string(x) + ", " +
                              std::to_string(y) + ") points outside the frame");
      }
      const float v = occluded(static_cast<int>(sx), static_cast<int>(sy));
      if (v > 0.0f) {
        out[i] = v;
      } else {
        result.unresolved.push_back(i);
      }
    }
  }
  result.depth = DepthImage(w, h, std::move(out));
  return result;
}

DisplacementField nearest_valid_field(const DepthImage& occluded, const PixelMask& mask) {
  require_same_size(occluded, mask, "nearest_valid_field");
  if (occluded.known_count() == 0) {
    throw NoValidSource("nearest_valid_field: the image has no known pixel");
  }
  const int w = occluded.width();
  const int h = occluded.height();
  const std::vector<double> dist = squared_distance_to_known(occluded);
  DisplacementField field(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = occluded.index(x, y);
      if (!mask.at(i) || dist[i] == 0.0) continue;
      // Walk the lattice points on the circle of radius^2 D in tie-break
      // order; the first known one wins.
      const auto d2 = static_cast<long long>(dist[i]);
      const auto r = static_cast<long long>(std::sqrt(static_cast<double>(d2)));
      bool found = false;
      for (long long dy = -r - 1; dy <= r + 1 && !found; ++dy) {
        const long long rem = d2 - dy * dy;
        if (rem < 0) continue;
        auto dx = static_cast<long long>(std::sqrt(static_cast<double>(rem)));
        while (dx * dx > rem) --dx;
        while ((dx + 1) * (dx + 1) <= rem) ++dx;
        if (dx * dx != rem) continue;
        for (const long long cand : {-dx, dx}) {
          const long long sx = x + cand;
          const long long sy = y + dy;
          if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
          if (!occluded.known(static_cast<int>(sx), static_cast<int>(sy))) continue;
          field.set(i, static_cast<std::int32_t>(cand), static_cast<std::int32_t>(dy));
          found = true;
          break;
        }
      }
      if (!found) throw std::logic_error("nearest_valid_field: distance transform mismatch");
    }
  }
  return field;
}

InpaintResult diffuse_inpaint(const DepthImage& occluded, const PixelMask& mask, int iterations,
                              double tolerance) {
  require_same_size(occluded, mask, "diffuse_inpaint");
  const int w = occluded.width();
  const int h = occluded.height();
  const std::size_t n = occluded.size();
  InpaintResult result{occluded, 0, {}};

  // Label 4-connected regions of target pixels and keep those that touch a
  // known pixel.
  constexpr int kNone = -1;
  std::vector<int> region(n, kNone);
  std::vector<std::size_t> targets;
  std::vector<double> value(n);
  for (std::size_t i = 0; i < n; ++i) value[i] = occluded.at(i);
  auto is_target = [&](std::size_t i) { return mask.at(i) && !occluded.known(i); };
  const int dxs[4] = {1, -1, 0, 0};
  const int dys[4] = {0, 0, 1, -1};

  int next_region = 0;
  std::vector<std::size_t> stack;
  std::vector<std::size_t> members;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!is_target(seed) || region[seed] != kNone) continue;
    members.clear();
    stack.assign(1, seed);
    region[seed] = next_region;
    double boundary_sum = 0.0;
    std::size_t boundary_count = 0;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      members.push_back(i);
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      for (int d = 0; d < 4; ++d) {
        const int nx = x + dxs[d];
        const int ny = y + dys[d];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = occluded.index(nx, ny);
        if (occluded.known(j)) {
          boundary_sum += occluded.at(j);
          ++boundary_count;
        } else if (is_target(j) && region[j] == kNone) {
          region[j] = next_region;
          stack.push_back(j);
        }
      }
    }
    ++next_region;
    if (boundary_count == 0) {
      result.unfilled_regions.push_back(members.size());
      continue;
    }
    const double start = boundary_sum / static_cast<double>(boundary_count);
    for (std::size_t i : members) value[i] = start;
    targets.insert(targets.end(), members.begin(), members.end());
  }
  std::sort(targets.begin(), targets.end());

  auto active = [&](std::size_t j) {
    return occluded.known(j) || (is_target(j) && value[j] > 0.0);
  };
  std::vector<double> next = value;
  for (int it = 0; it < iterations && !targets.empty(); ++it) {
    double max_update = 0.0;
    for (std::size_t i : targets) {
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      double sum = 0.0;
      int count = 0;
      for (int d = 0; d < 4; ++d) {
        const int nx = x + dxs[d];
        const int ny = y + dys[d];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = occluded.index(nx, ny);
        if (!active(j)) continue;
        sum += value[j];
        ++count;
      }
      next[i] = sum / count;  // count >= 1: every region member has an active neighbour
      max_update = std::max(max_update, std::abs(next[i] - value[i]));
    }
    for (std::size_t i : targets) value[i] = next[i];
    result.iterations = it + 1;
    if (max_update < tolerance) break;
  }

  std::vector<float> out(occluded.data().begin(), occluded.data().end());
  for (std::size_t i : targets) out[i] = static_cast<float>(value[i]);
  result.depth = DepthImage(w, h, std::move(out));
  return result;
}

DepthImage fill_unresolved(const DisplacementResult& result, int iterations, double tolerance) {
  PixelMask holes(result.depth.width(), result.depth.height());
  for (std::size_t i : result.unresolved) holes.set(i);
  return diffuse_inpaint(result.depth, holes, iterations, tolerance).depth;
}

Completer nearest_completer() {
  return [](const DepthImage& occluded, const PixelMask& mask) {
    return apply_displacement(occluded, mask, nearest_valid_field(occluded, mask)).depth;
  };
}

Completer diffuse_completer(int iterations, double tolerance) {
  return [iterations, tolerance](const DepthImage& occluded, const PixelMask& mask) {
    return diffuse_inpaint(occluded, mask, iterations, tolerance).depth;
  };
}

std::vector<Pose> default_fusion_poses(std::uint64_t seed, int count) {
  if (count < 0) throw InvalidArgument("pose count must be non-negative");
  PoseSamplerConfig cfg;
  cfg.seed = seed;
  std::vector<Pose> poses;
  for (int i = 0; i < count; ++i) poses.push_back(sample_pose(cfg, static_cast<std::uint64_t>(i)));
  return poses;
}

DepthImage fuse_views(const DepthImage& base, const CameraIntrinsics& k,
                      const std::vector<Pose>& poses, const Completer& completer,
                      const WarpConfig& cfg, int jobs) {
  if (poses.empty()) throw InvalidArgument("fuse_views: at least one pose is required");
  const int w = base.width();
  const int h = base.height();
  std::vector<std::optional<DepthImage>> views(poses.size());
  parallel_for(poses.size(), jobs, [&](std::size_t v) {
    const DepthImage there = warp_depth(base, k, poses[v], cfg);
    if (there.known_count() == 0) return;
    const PixelMask holes = subtract(PixelMask(w, h, std::vector<std::uint8_t>(base.size(), 1)),
                                     known_mask(there));
    const DepthImage completed = completer(there, holes);
    views[v] = warp_depth(completed, k, pose_inverse(poses[v]), cfg);
  });

  std::vector<float> out(base.size(), 0.0f);
  std::vector<float> candidates;
  for (std::size_t i = 0; i < base.size(); ++i) {
    candidates.clear();
    if (base.known(i)) candidates.push_back(base.at(i));
    for (const auto& view : views) {
      if (view && view->known(i)) candidates.push_back(view->at(i));
    }
    if (candidates.empty()) continue;
    const std::size_t mid = (candidates.size() - 1) / 2;  // lower median
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<long>(mid),
                     candidates.end());
    out[i] = candidates[mid];
  }
  return DepthImage(w, h, std::move(out));
}

}  // namespace dualwarp
