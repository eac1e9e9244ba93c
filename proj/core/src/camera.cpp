#include "dualwarp/camera.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "dualwarp/errors.hpp"

namespace dualwarp {
namespace {

constexpr double kRotationTol = 1e-9;

}  // namespace

CameraIntrinsics::CameraIntrinsics(double f_, double cx_, double cy_) : f(f_), cx(cx_), cy(cy_) {
  if (!(std::isfinite(f) && f > 0.0)) throw InvalidArgument("focal length must be > 0");
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw InvalidArgument("principal point must be finite");
  }
}

CameraIntrinsics intrinsics_scale(const CameraIntrinsics& k, double factor) {
  if (!(std::isfinite(factor) && factor > 0.0)) {
    throw InvalidArgument("intrinsics scale factor must be > 0");
  }
  return {k.f * factor, k.cx * factor, k.cy * factor};
}

Pose::Pose() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation_.allFinite() || !translation_.allFinite()) {
    throw InvalidArgument("pose contains non-finite values");
  }
  const double ortho_err =
      (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > kRotationTol) throw InvalidArgument("rotation is not orthonormal");
  if (std::abs(rotation_.determinant() - 1.0) > kRotationTol) {
    throw InvalidArgument("rotation determinant is not +1");
  }
}

Pose Pose::from_translation(const Eigen::Vector3d& t) { return {Eigen::Matrix3d::Identity(), t}; }

Pose Pose::from_yaw(double yaw_degrees, const Eigen::Vector3d& t) {
  const double a = yaw_degrees * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  Eigen::Matrix3d r;
  // clang-format off
  r <<  c, 0.0,   s,
      0.0, 1.0, 0.0,
       -s, 0.0,   c;
  // clang-format on
  return {r, t};
}

bool Pose::is_approx(const Pose& other, double tol) const {
  return (rotation_ - other.rotation_).cwiseAbs().maxCoeff() <= tol &&
         (translation_ - other.translation_).cwiseAbs().maxCoeff() <= tol;
}

Pose pose_compose(const Pose& a, const Pose& b) {
  return {a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation()};
}

Pose pose_inverse(const Pose& p) {
  const Eigen::Matrix3d rt = p.rotation().transpose();
  return {rt, -(rt * p.translation())};
}

}  // namespace dualwarp
