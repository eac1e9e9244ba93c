#pragma once

#include <Eigen/Core>

namespace dualwarp {

/// Pinhole intrinsics K = [f 0 cx; 0 f cy; 0 0 1], all in pixels.
///
/// Camera frame convention: right-handed, looking along +z, x to the right,
/// y down. Pixel (0, 0) is the centre of the top-left pixel.
struct CameraIntrinsics {
  double f;
  double cx;
  double cy;

  /// Throws InvalidArgument unless f > 0 and cx, cy are finite.
  CameraIntrinsics(double f, double cx, double cy);

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Multiplies f, cx and cy by `factor`; used for supersampled warping.
CameraIntrinsics intrinsics_scale(const CameraIntrinsics& k, double factor);

/// Rigid transform X -> R X + T.
///
/// As a relative pose between two cameras it maps camera-frame points of the
/// source view into the camera frame of the target view. As a camera
/// placement (scene rendering) it maps camera coordinates to world
/// coordinates.
class Pose {
 public:
  Pose();  // identity
  /// Throws InvalidArgument unless R^T R = I and det R = 1 within 1e-9.
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static Pose identity() { return {}; }
  static Pose from_translation(const Eigen::Vector3d& t);
  /// Rotation about the camera's vertical (y) axis by `yaw_degrees`, then
  /// translation by t.
  static Pose from_yaw(double yaw_degrees, const Eigen::Vector3d& t = Eigen::Vector3d::Zero());

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation_ * p + translation_; }

  bool is_approx(const Pose& other, double tol) const;

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.rotation_ == b.rotation_ && a.translation_ == b.translation_;
  }

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

/// Applies b first, then a: R = Ra Rb, T = Ra Tb + Ta.
Pose pose_compose(const Pose& a, const Pose& b);

/// (R^T, -R^T T).
Pose pose_inverse(const Pose& p);

}  // namespace dualwarp
