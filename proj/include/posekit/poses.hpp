#pragma once

// Rigid transforms (SE(3)) and their parameter charts: Euler pose (Pose6),
// quaternion pose (Pose7) and tangent pose, plus the se(3) exp/log pair.

#include <Eigen/Dense>

#include "posekit/errors.hpp"
#include "posekit/rotations.hpp"

namespace posekit {

using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Rigid transform x -> R x + t.
struct Transform {
  RotationMatrix R = RotationMatrix::identity();
  Vec3 t = Vec3::Zero();

  static Transform identity() { return {}; }

  /// 4x4 homogeneous form [R t; 0 1].
  Eigen::Matrix4d homogeneous() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = R.matrix();
    m.topRightCorner<3, 1>() = t;
    return m;
  }
};

/// a * b: apply b first, then a.
inline Transform compose(const Transform& a, const Transform& b) {
  return {RotationMatrix(Mat3(a.R.matrix() * b.R.matrix())), a.R.matrix() * b.t + a.t};
}

inline Transform inverse(const Transform& a) {
  const Mat3 rt = a.R.matrix().transpose();
  return {RotationMatrix(rt), Vec3(-(rt * a.t))};
}

/// Relative transform taking a to b: inverse(a) * b.
inline Transform relative(const Transform& a, const Transform& b) {
  return compose(inverse(a), b);
}

/// Translation plus intrinsic Z-Y-X Euler angles.
struct Pose6 {
  Vec3 t = Vec3::Zero();
  EulerAngles angles;
};

/// Translation plus quaternion coordinates (w-first). The quaternion is
/// normalized on conversion, so any nonzero scale names the same pose.
struct Pose7 {
  Vec3 t = Vec3::Zero();
  RawQuaternion q;
};

/// Translation plus exponential rotation coordinates. The translation is the
/// group translation verbatim, not the se(3) tangent translation.
struct TangentPose {
  Vec3 t = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

inline Transform pose6_to_transform(const Pose6& p) {
  return {euler_to_matrix(p.angles), p.t};
}

/// Euler chart of a transform, with the gimbal flag passed through.
struct Pose6Chart {
  Pose6 pose;
  bool gimbal_lock = false;
};

inline Pose6Chart transform_to_pose6(const Transform& tf) {
  const EulerChart chart = matrix_to_euler(tf.R);
  return {Pose6{tf.t, chart.angles}, chart.gimbal_lock};
}

/// Throws ZeroQuaternion when the quaternion cannot be normalized.
inline Transform pose7_to_transform(const Pose7& p) {
  return {quat_to_matrix(UnitQuaternion::normalize(p.q)), p.t};
}

/// Quaternion chart on the canonical hemisphere (w >= 0).
inline Pose7 transform_to_pose7(const Transform& tf) {
  return {tf.t, matrix_to_quat(tf.R).raw()};
}

inline Transform tangent_to_transform(const TangentPose& p) {
  return {exp_so3(p.omega), p.t};
}

/// se(3) exponential. xi = [rho; omega]; the group translation is V(omega)*rho
/// with V the left Jacobian, so a pure-rotation xi still moves the origin.
inline Transform exp_se3(const Vector6& xi) {
  const Vec3 rho = xi.head<3>();
  const Vec3 omega = xi.tail<3>();
  return {exp_so3(omega), Vec3(left_jacobian_so3(omega) * rho)};
}

/// se(3) logarithm. Requires the rotation angle below pi - 1e-6, where the
/// axis (and hence V) is uniquely determined; throws NearPiRotation beyond.
inline Vector6 log_se3(const Transform& tf) {
  const Vec3 omega = log_so3(tf.R);
  const double angle = omega.norm();
  if (angle >= kPi - 1e-6) {
    throw NearPiRotation("rotation angle " + std::to_string(angle) +
                         " is too close to pi for a stable se(3) logarithm");
  }
  const Mat3 v = left_jacobian_so3(omega);
  Vector6 xi;
  xi.head<3>() = v.partialPivLu().solve(tf.t);
  xi.tail<3>() = omega;
  return xi;
}

/// Random transform: Haar-uniform rotation, translation uniform in
/// [-range, range]^3. Draw order is rotation then translation.
inline Transform random_transform(std::mt19937_64& rng, double range = 2.0) {
  const RotationMatrix r = random_rotation(rng);
  std::uniform_real_distribution<double> u(-range, range);
  const double x = u(rng), y = u(rng), z = u(rng);
  return {r, Vec3(x, y, z)};
}

}  // namespace posekit
