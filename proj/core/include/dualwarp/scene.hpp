#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "dualwarp/camera.hpp"
#include "dualwarp/image.hpp"
#include "dualwarp/warp.hpp"

namespace dualwarp {

/// Solid box, axis-aligned in its local frame and centred on the local origin.
struct Box {
  Eigen::Vector3d half_extents;
  Pose placement;  // local -> world
};

/// Two-sided infinite plane z = 0 of its local frame.
struct Plane {
  Pose placement;  // local -> world
};

using Primitive = std::variant<Box, Plane>;

struct Bounds {
  Eigen::Vector3d min;
  Eigen::Vector3d max;
};

/// Synthetic scene with exact ray-cast depth, used as ground truth for
/// the dual-warp properties.
class Scene {
 public:
  explicit Scene(std::vector<Primitive> primitives);

  const std::vector<Primitive>& primitives() const { return primitives_; }
  /// Bounding box of all boxes plus the origins of all planes.
  Bounds bounds() const;

  /// Nearest hit of the ray origin + t * dir with t > min_t; returns +inf if
  /// nothing is hit.
  double cast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
              double min_t = 0.0) const;

  /// True if `point` lies strictly inside any box.
  bool inside_solid(const Eigen::Vector3d& point) const;

  friend bool operator==(const Scene& a, const Scene& b);

 private:
  std::vector<Primitive> primitives_;
};

/// Renders z-depth through pixel centres. `camera` is the camera placement
/// (camera -> world). No hit gives 0. Throws InvalidArgument if the camera
/// sits inside a box.
DepthImage render_depth(const Scene& scene, const CameraIntrinsics& k, const Pose& camera,
                        int width, int height);

/// Exact visibility of world point `point` from a camera: inside the frame
/// (after rounding to the nearest pixel) and not hidden behind other geometry.
bool visible_from(const Scene& scene, const Eigen::Vector3d& point, const CameraIntrinsics& k,
                  const Pose& camera, int width, int height);

struct SceneRandomConfig {
  int min_boxes = 3;
  int max_boxes = 8;
  double min_side = 0.3;
  double max_side = 2.0;
  double wall_distance = 9.0;     // back wall plane z = wall_distance
  double min_wall_gap = 1.0;      // boxes sit 1..6 m in front of the wall
  double max_wall_gap = 6.0;
  double lateral_extent = 3.0;    // box centre x in [-e, e]
  double vertical_extent = 1.0;   // box centre y in [-e, e]
  double floor_height = 1.5;      // floor plane y = floor_height (y points down)
};

/// Random indoor-like scene: a back wall, a floor and a few boxes.
Scene random_scene(std::uint64_t seed, const SceneRandomConfig& cfg = {});

/// Scene with a single frontal plane at depth `z`.
Scene single_plane_scene(double z);

/// Standard camera rig used by the oracle suites.
struct OracleCamera {
  CameraIntrinsics k{150.0, 79.5, 59.5};
  int width = 160;
  int height = 120;
};

struct LemmaReport {
  std::size_t violations = 0;     // |erode(O\O~) & erode(O & P^[O])|
  std::size_t occluded_dual = 0;  // |O \ O~|
  std::size_t occluded_true = 0;  // |O \ P^[O]|
  std::size_t spurious = 0;       // pixels of O \ O~ that the oracle sees from P
};

/// Checks that the dual-warp occlusion of O is contained in the occlusion
/// obtained by warping the true second view P back to O. Agreement between
/// O and P^[O] uses depth_consistent, the same test that decides membership
/// in O~.
///
/// Point splatting aliases at silhouettes and on grazing surfaces, so both
/// the dual-warp occlusion mask and the true visibility mask are eroded by
/// one pixel before their overlap is counted as violations.
LemmaReport verify_lemma(const Scene& scene, const OracleCamera& camera, const Pose& pose_o,
                         const Pose& pose_p, const WarpConfig& cfg);

/// Trial `index` of a lemma suite: a random scene and the placement of the
/// second camera; the first camera sits at the world origin. Trial t of seed
/// s uses the scene seed derive_seed(derive_seed(s, t), 0) and pose 1 of the
/// default pose sampler seeded with derive_seed(s, t).
struct LemmaTrial {
  Scene scene;
  Pose pose_p;
};
LemmaTrial lemma_trial(std::uint64_t seed, std::uint64_t index);

struct LemmaSuiteResult {
  std::vector<LemmaReport> reports;  // one per trial, in trial order
  std::size_t failed_trials = 0;     // trials with at least one violation
};

/// Runs `trials` lemma trials on up to `jobs` threads.
LemmaSuiteResult run_lemma_suite(int trials, std::uint64_t seed, const WarpConfig& cfg,
                                 int jobs = 1, const OracleCamera& camera = {});

/// Plain-text scene description, one primitive per line:
///   box hx hy hz r00 r01 r02 r10 r11 r12 r20 r21 r22 tx ty tz
///   plane r00 ... r22 tx ty tz
/// Lines starting with '#' and blank lines are ignored. Numbers are written
/// with 17 significant digits so round trips are exact.
std::string scene_to_text(const Scene& scene);
Scene scene_from_text(const std::string& text);

}  // namespace dualwarp
