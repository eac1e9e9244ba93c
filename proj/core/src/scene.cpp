#include "dualwarp/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "dualwarp/datagen.hpp"
#include "dualwarp/errors.hpp"
#include "dualwarp/parallel.hpp"
#include "dualwarp/random.hpp"

namespace dualwarp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double intersect(const Box& box, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                 double min_t) {
  const Eigen::Matrix3d rt = box.placement.rotation().transpose();
  const Eigen::Vector3d o = rt * (origin - box.placement.translation());
  const Eigen::Vector3d d = rt * dir;
  double t0 = -kInf;
  double t1 = kInf;
  for (int a = 0; a < 3; ++a) {
    const double lo = -box.half_extents[a];
    const double hi = box.half_extents[a];
    if (d[a] == 0.0) {
      if (o[a] < lo || o[a] > hi) return kInf;
      continue;
    }
    double ta = (lo - o[a]) / d[a];
    double tb = (hi - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return kInf;
  }
  if (t0 > min_t) return t0;
  if (t1 > min_t) return t1;
  return kInf;
}

double intersect(const Plane& plane, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                 double min_t) {
  const Eigen::Vector3d n = plane.placement.rotation().col(2);
  const double denom = n.dot(dir);
  if (denom == 0.0) return kInf;
  const double t = n.dot(plane.placement.translation() - origin) / denom;
  return t > min_t ? t : kInf;
}

void append_pose(std::ostringstream& os, const Pose& p) {
  char buf[40];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      std::snprintf(buf, sizeof buf, " %.17g", p.rotation()(r, c));
      os << buf;
    }
  }
  for (int i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof buf, " %.17g", p.translation()[i]);
    os << buf;
  }
}

Pose read_pose(std::istringstream& in, int line_no) {
  Eigen::Matrix3d r;
  Eigen::Vector3d t;
  for (int i = 0; i < 9; ++i) {
    if (!(in >> r(i / 3, i % 3))) {
      throw FormatError("scene line " + std::to_string(line_no) + ": bad rotation");
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (!(in >> t[i])) {
      throw FormatError("scene line " + std::to_string(line_no) + ": bad translation");
    }
  }
  try {
    return {r, t};
  } catch (const InvalidArgument& e) {
    throw FormatError("scene line " + std::to_string(line_no) + ": " + e.what());
  }
}

Eigen::Vector3d pixel_ray(const CameraIntrinsics& k, double x, double y) {
  return {(x - k.cx) / k.f, (y - k.cy) / k.f, 1.0};
}

}  // namespace

Scene::Scene(std::vector<Primitive> primitives) : primitives_(std::move(primitives)) {
  if (primitives_.empty()) throw InvalidArgument("scene needs at least one primitive");
  for (const auto& p : primitives_) {
    if (const auto* box = std::get_if<Box>(&p)) {
      if (!(box->half_extents.array() > 0.0).all() || !box->half_extents.allFinite()) {
        throw InvalidArgument("box half extents must be positive");
      }
    }
  }
}

Bounds Scene::bounds() const {
  Bounds b{Eigen::Vector3d::Constant(kInf), Eigen::Vector3d::Constant(-kInf)};
  for (const auto& p : primitives_) {
    if (const auto* box = std::get_if<Box>(&p)) {
      for (int corner = 0; corner < 8; ++corner) {
        const Eigen::Vector3d local((corner & 1) ? box->half_extents.x() : -box->half_extents.x(),
                                    (corner & 2) ? box->half_extents.y() : -box->half_extents.y(),
                                    (corner & 4) ? box->half_extents.z() : -box->half_extents.z());
        const Eigen::Vector3d w = box->placement.apply(local);
        b.min = b.min.cwiseMin(w);
        b.max = b.max.cwiseMax(w);
      }
    } else {
      const Eigen::Vector3d& o = std::get<Plane>(p).placement.translation();
      b.min = b.min.cwiseMin(o);
      b.max = b.max.cwiseMax(o);
    }
  }
  return b;
}

double Scene::cast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, double min_t) const {
  double best = kInf;
  for (const auto& p : primitives_) {
    const double t = std::visit([&](const auto& prim) { return intersect(prim, origin, dir, min_t); }, p);
    best = std::min(best, t);
  }
  return best;
}

bool Scene::inside_solid(const Eigen::Vector3d& point) const {
  for (const auto& p : primitives_) {
    const auto* box = std::get_if<Box>(&p);
    if (!box) continue;
    const Eigen::Vector3d local =
        box->placement.rotation().transpose() * (point - box->placement.translation());
    if ((local.cwiseAbs().array() < box->half_extents.array()).all()) return true;
  }
  return false;
}

bool operator==(const Scene& a, const Scene& b) {
  if (a.primitives_.size() != b.primitives_.size()) return false;
  for (std::size_t i = 0; i < a.primitives_.size(); ++i) {
    const auto& pa = a.primitives_[i];
    const auto& pb = b.primitives_[i];
    if (pa.index() != pb.index()) return false;
    if (const auto* ba = std::get_if<Box>(&pa)) {
      const auto& bb = std::get<Box>(pb);
      if (ba->half_extents != bb.half_extents || !(ba->placement == bb.placement)) return false;
    } else if (!(std::get<Plane>(pa).placement == std::get<Plane>(pb).placement)) {
      return false;
    }
  }
  return true;
}

DepthImage render_depth(const Scene& scene, const CameraIntrinsics& k, const Pose& camera,
                        int width, int height) {
  const Eigen::Vector3d origin = camera.translation();
  if (scene.inside_solid(origin)) throw InvalidArgument("camera is inside a solid primitive");
  DepthImage probe(width, height);  // validates dimensions
  std::vector<float> depth(probe.size(), 0.0f);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      // The camera-frame ray has unit z, so the ray parameter is the z-depth.
      const Eigen::Vector3d dir = camera.rotation() * pixel_ray(k, x, y);
      const double t = scene.cast(origin, dir);
      if (std::isfinite(t)) {
        const float z = static_cast<float>(t);
        if (z > 0.0f && std::isfinite(z)) depth[probe.index(x, y)] = z;
      }
    }
  }
  return DepthImage(width, height, std::move(depth));
}

bool visible_from(const Scene& scene, const Eigen::Vector3d& point, const CameraIntrinsics& k,
                  const Pose& camera, int width, int height) {
  const Eigen::Vector3d pc = pose_inverse(camera).apply(point);
  if (!(pc.z() > 0.0)) return false;
  const double u = std::floor(k.f * pc.x() / pc.z() + k.cx + 0.5);
  const double v = std::floor(k.f * pc.y() / pc.z() + k.cy + 0.5);
  if (u < 0.0 || v < 0.0 || u >= width || v >= height) return false;
  const Eigen::Vector3d dir = camera.rotation() * (pc / pc.z());
  const double t = scene.cast(camera.translation(), dir);
  // The point itself lies on a surface; allow for float storage of depths.
  const double eps = 1e-5 * (1.0 + pc.z());
  return t >= pc.z() - eps;
}

Scene random_scene(std::uint64_t seed, const SceneRandomConfig& cfg) {
  Rng rng(seed);
  std::vector<Primitive> prims;
  prims.push_back(Plane{Pose::from_translation({0.0, 0.0, cfg.wall_distance})});
  Eigen::Matrix3d floor_rot;
  // clang-format off
  floor_rot << 1.0, 0.0,  0.0,
               0.0, 0.0, -1.0,
               0.0, 1.0,  0.0;
  // clang-format on
  prims.push_back(Plane{Pose(floor_rot, {0.0, cfg.floor_height, 0.0})});
  const auto boxes = rng.uniform_int(cfg.min_boxes, cfg.max_boxes);
  for (std::int64_t i = 0; i < boxes; ++i) {
    const Eigen::Vector3d half(0.5 * rng.uniform(cfg.min_side, cfg.max_side),
                               0.5 * rng.uniform(cfg.min_side, cfg.max_side),
                               0.5 * rng.uniform(cfg.min_side, cfg.max_side));
    const double z = cfg.wall_distance - rng.uniform(cfg.min_wall_gap, cfg.max_wall_gap);
    const double x = rng.uniform(-cfg.lateral_extent, cfg.lateral_extent);
    const double y = rng.uniform(-cfg.vertical_extent, cfg.vertical_extent);
    const double yaw = rng.uniform(0.0, 90.0);
    prims.push_back(Box{half, Pose::from_yaw(yaw, {x, y, z})});
  }
  return Scene(std::move(prims));
}

Scene single_plane_scene(double z) {
  return Scene({Plane{Pose::from_translation({0.0, 0.0, z})}});
}

LemmaReport verify_lemma(const Scene& scene, const OracleCamera& camera, const Pose& pose_o,
                         const Pose& pose_p, const WarpConfig& cfg) {
  const int w = camera.width;
  const int h = camera.height;
  const DepthImage o = render_depth(scene, camera.k, pose_o, w, h);
  const DepthImage p = render_depth(scene, camera.k, pose_p, w, h);
  const Pose o_to_p = pose_compose(pose_inverse(pose_p), pose_o);

  const DualWarpResult dual = dual_warp(o, camera.k, o_to_p, cfg);
  const DepthImage p_at_o = warp_depth(p, camera.k, pose_inverse(o_to_p), cfg);

  PixelMask occ_true(w, h);
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (!o.known(i)) continue;
    const int x = static_cast<int>(i % static_cast<std::size_t>(w));
    const int y = static_cast<int>(i / static_cast<std::size_t>(w));
    if (!(p_at_o.known(i) && depth_consistent(o, x, y, p_at_o.at(i), camera.k, o_to_p, cfg))) occ_true.set(i);
  }

  LemmaReport report;
  report.occluded_dual = dual.mask.count();
  report.occluded_true = occ_true.count();
  const PixelMask visible_true = subtract(known_mask(o), occ_true);
  report.violations = intersect(erode(dual.mask), erode(visible_true)).count();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!dual.mask(x, y)) continue;
      const Eigen::Vector3d point =
          pose_o.apply(static_cast<double>(o(x, y)) * pixel_ray(camera.k, x, y));
      if (visible_from(scene, point, camera.k, pose_p, w, h)) ++report.spurious;
    }
  }
  return report;
}

LemmaTrial lemma_trial(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t trial_seed = derive_seed(seed, index);
  PoseSamplerConfig pose_cfg;
  pose_cfg.seed = trial_seed;
  return {random_scene(derive_seed(trial_seed, 0)), sample_pose(pose_cfg, 1)};
}

LemmaSuiteResult run_lemma_suite(int trials, std::uint64_t seed, const WarpConfig& cfg,
                                 int jobs, const OracleCamera& camera) {
  if (trials < 0) throw InvalidArgument("trial count must be non-negative");
  LemmaSuiteResult result;
  result.reports.resize(static_cast<std::size_t>(trials));
  parallel_for(result.reports.size(), jobs, [&](std::size_t t) {
    const LemmaTrial trial = lemma_trial(seed, t);
    result.reports[t] = verify_lemma(trial.scene, camera, Pose::identity(), trial.pose_p, cfg);
  });
  for (const auto& r : result.reports) result.failed_trials += r.violations > 0 ? 1 : 0;
  return result;
}

std::string scene_to_text(const Scene& scene) {
  std::ostringstream os;
  os << "# dualwarp scene v1\n";
  char buf[40];
  for (const auto& p : scene.primitives()) {
    if (const auto* box = std::get_if<Box>(&p)) {
      os << "box";
      for (int i = 0; i < 3; ++i) {
        std::snprintf(buf, sizeof buf, " %.17g", box->half_extents[i]);
        os << buf;
      }
      append_pose(os, box->placement);
    } else {
      os << "plane";
      append_pose(os, std::get<Plane>(p).placement);
    }
    os << '\n';
  }
  return os.str();
}

Scene scene_from_text(const std::string& text) {
  std::istringstream all(text);
  std::string line;
  std::vector<Primitive> prims;
  int line_no = 0;
  while (std::getline(all, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream in(line);
    std::string kind;
    in >> kind;
    if (kind == "box") {
      Eigen::Vector3d half;
      for (int i = 0; i < 3; ++i) {
        if (!(in >> half[i]) || !(half[i] > 0.0)) {
          throw FormatError("scene line " + std::to_string(line_no) + ": bad box extents");
        }
      }
      prims.push_back(Box{half, read_pose(in, line_no)});
    } else if (kind == "plane") {
      prims.push_back(Plane{read_pose(in, line_no)});
    } else {
      throw FormatError("scene line " + std::to_string(line_no) + ": unknown primitive '" +
                        kind + "'");
    }
    std::string extra;
    if (in >> extra) {
      throw FormatError("scene line " + std::to_string(line_no) + ": trailing data");
    }
  }
  if (prims.empty()) throw FormatError("scene has no primitives");
  return Scene(std::move(prims));
}

}  // namespace dualwarp
