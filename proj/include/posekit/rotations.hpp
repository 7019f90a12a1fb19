#pragma once

// Rotation representations and conversions: intrinsic Z-Y-X Euler angles, unit
// quaternions (w-first, canonical hemisphere w >= 0), rotation matrices, and
// exponential coordinates (axis-angle vectors), plus the so(3) exp/log pair and
// its left/right Jacobians.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "posekit/errors.hpp"

namespace posekit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Exponential coordinates: axis * angle, with the canonical angle in [0, pi].
using AxisVector = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

/// Intrinsic Z-Y-X chart: R = R_z(yaw) * R_y(pitch) * R_x(roll).
/// pitch lives in [-pi/2, pi/2]; yaw and roll in (-pi, pi].
struct EulerAngles {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

/// Unconstrained quaternion coordinates, w-first. Not necessarily unit length;
/// use UnitQuaternion for values that must represent rotations.
struct RawQuaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double squared_norm() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(squared_norm()); }
  RawQuaternion negated() const { return {-w, -x, -y, -z}; }
};

/// Quaternion constrained to unit norm at construction (|q.q - 1| <= 1e-9).
class UnitQuaternion {
 public:
  UnitQuaternion(double w, double x, double y, double z) : q_{w, x, y, z} {
    const double defect = std::abs(q_.squared_norm() - 1.0);
    if (defect > 1e-9) {
      std::ostringstream msg;
      msg << "unit quaternion constraint violated: |q.q - 1| = " << defect;
      throw std::invalid_argument(msg.str());
    }
  }

  static UnitQuaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }

  /// Normalizes arbitrary coordinates onto the unit sphere.
  /// Throws ZeroQuaternion when the norm is below 1e-12.
  static UnitQuaternion normalize(const RawQuaternion& q) {
    const double n = q.norm();
    if (n < 1e-12) {
      throw ZeroQuaternion("cannot normalize a quaternion with norm " + std::to_string(n));
    }
    return {q.w / n, q.x / n, q.y / n, q.z / n};
  }

  double w() const { return q_.w; }
  double x() const { return q_.x; }
  double y() const { return q_.y; }
  double z() const { return q_.z; }
  const RawQuaternion& raw() const { return q_; }

  UnitQuaternion negated() const { return {-q_.w, -q_.x, -q_.y, -q_.z}; }

  /// Representative on the canonical hemisphere w >= 0. On the equator w == 0
  /// the first nonzero vector component is made positive, so every rotation
  /// has exactly one canonical representative.
  UnitQuaternion canonicalized() const {
    if (q_.w < 0.0) return negated();
    if (q_.w == 0.0) {
      for (double c : {q_.x, q_.y, q_.z}) {
        if (c != 0.0) return c < 0.0 ? negated() : *this;
      }
    }
    return *this;
  }

 private:
  RawQuaternion q_;
};

/// Largest deviation of m from a proper rotation: max over the elementwise
/// orthonormality residual |m^T m - I| and the determinant residual |det - 1|.
inline double rotation_defect(const Mat3& m) {
  const Mat3 residual = m.transpose() * m - Mat3::Identity();
  return std::max(residual.cwiseAbs().maxCoeff(), std::abs(m.determinant() - 1.0));
}

/// Nearest rotation in the Frobenius sense, via SVD with determinant repair.
inline Mat3 project_to_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

/// 3x3 matrix constrained to SO(3) at construction: R^T R = I elementwise and
/// det R = 1, both within 1e-9.
class RotationMatrix {
 public:
  explicit RotationMatrix(const Mat3& m) : m_(m) {
    const double defect = rotation_defect(m);
    if (defect > 1e-9) {
      std::ostringstream msg;
      msg << "rotation matrix constraint violated: defect = " << defect;
      throw std::invalid_argument(msg.str());
    }
  }

  static RotationMatrix identity() { return RotationMatrix(Mat3::Identity()); }

  const Mat3& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  RotationMatrix transposed() const { return RotationMatrix(m_.transpose()); }

 private:
  Mat3 m_;
};

/// Elementary rotation about +x by angle a.
inline RotationMatrix rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return RotationMatrix(m);
}

/// Elementary rotation about +y by angle a.
inline RotationMatrix rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return RotationMatrix(m);
}

/// Elementary rotation about +z by angle a.
inline RotationMatrix rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return RotationMatrix(m);
}

/// R = R_z(yaw) * R_y(pitch) * R_x(roll), written out in closed form.
inline RotationMatrix euler_to_matrix(const EulerAngles& e) {
  const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
  const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);
  Mat3 m;
  m << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp, cp * sr, cp * cr;
  return RotationMatrix(m);
}

/// Euler decomposition plus a flag for the chart singularity. When gimbal_lock
/// is set, |pitch| is within ~1e-7 of pi/2, roll is fixed to 0 and yaw absorbs
/// the remaining free parameter; the angles still reproduce the rotation.
struct EulerChart {
  EulerAngles angles;
  bool gimbal_lock = false;
};

inline EulerChart matrix_to_euler(const RotationMatrix& r) {
  const Mat3& m = r.matrix();
  EulerChart out;
  const double sp = std::clamp(-m(2, 0), -1.0, 1.0);
  out.angles.pitch = std::asin(sp);
  // cos(pitch) recovered from the bottom row; the chart degenerates with it.
  const double cp = std::hypot(m(2, 1), m(2, 2));
  if (cp < 1e-7) {
    out.gimbal_lock = true;
    out.angles.roll = 0.0;
    out.angles.yaw = std::atan2(-m(0, 1), m(1, 1));
  } else {
    out.angles.yaw = std::atan2(m(1, 0), m(0, 0));
    out.angles.roll = std::atan2(m(2, 1), m(2, 2));
  }
  // atan2 may return -pi exactly; fold it onto the (-pi, pi] convention.
  if (out.angles.yaw <= -kPi) out.angles.yaw = kPi;
  if (out.angles.roll <= -kPi) out.angles.roll = kPi;
  return out;
}

/// Rotation matrix of a unit quaternion. Invariant under q -> -q exactly,
/// because every entry is a product of two coordinates.
inline RotationMatrix quat_to_matrix(const UnitQuaternion& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return RotationMatrix(m);
}

/// Quaternion of a rotation matrix on the canonical hemisphere (w >= 0).
/// Branches on the largest of trace and diagonal entries for stability.
inline UnitQuaternion matrix_to_quat(const RotationMatrix& r) {
  const Mat3& m = r.matrix();
  const double tr = m.trace();
  double w, x, y, z;
  if (tr > 0.0) {
    const double s = 2.0 * std::sqrt(tr + 1.0);
    w = 0.25 * s;
    x = (m(2, 1) - m(1, 2)) / s;
    y = (m(0, 2) - m(2, 0)) / s;
    z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) >= m(1, 1) && m(0, 0) >= m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2));
    w = (m(2, 1) - m(1, 2)) / s;
    x = 0.25 * s;
    y = (m(0, 1) + m(1, 0)) / s;
    z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) >= m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2));
    w = (m(0, 2) - m(2, 0)) / s;
    x = (m(0, 1) + m(1, 0)) / s;
    y = 0.25 * s;
    z = (m(1, 2) + m(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1));
    w = (m(1, 0) - m(0, 1)) / s;
    x = (m(0, 2) + m(2, 0)) / s;
    y = (m(1, 2) + m(2, 1)) / s;
    z = 0.25 * s;
  }
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  return UnitQuaternion(w / n, x / n, y / n, z / n).canonicalized();
}

/// Skew-symmetric cross-product matrix of v.
inline Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// Inverse of hat. Throws NotSkew when the antisymmetry defect exceeds 1e-9.
inline Vec3 vee(const Mat3& s) {
  const double defect = (s + s.transpose()).cwiseAbs().maxCoeff();
  if (defect > 1e-9) {
    std::ostringstream msg;
    msg << "antisymmetry defect " << defect << " exceeds 1e-9";
    throw NotSkew(msg.str());
  }
  return {s(2, 1), s(0, 2), s(1, 0)};
}

/// Rodrigues formula: exp(hat(w)) = I + A*K + B*K^2 with A = sin(t)/t and
/// B = (1-cos(t))/t^2, series-expanded below t = 1e-4 to avoid cancellation.
inline RotationMatrix exp_so3(const Vec3& w) {
  const double t2 = w.squaredNorm();
  const double t = std::sqrt(t2);
  double a, b;
  if (t < 1e-4) {
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  const Mat3 k = hat(w);
  return RotationMatrix(Mat3(Mat3::Identity() + a * k + b * (k * k)));
}

/// Logarithm of a rotation, returned as an axis vector with angle in [0, pi].
///
/// Three branches keep every regime well conditioned:
///  - t < 1e-6: series on the antisymmetric part (t/(2 sin t) ~ 1/2 + t^2/24);
///  - t > pi - 1e-6: axis from the symmetrized matrix (the antisymmetric part
///    vanishes like pi - t), sign from the antisymmetric part while it is
///    resolvable, else first nonzero axis component made positive (at t = pi
///    both signs name the same rotation);
///  - otherwise: axis from the antisymmetric part, angle from atan2.
inline AxisVector log_so3(const RotationMatrix& r) {
  const Mat3& m = r.matrix();
  const Vec3 anti(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double sin2t = anti.norm();                              // 2 sin(t)
  const double cos2t = std::clamp(m.trace() - 1.0, -2.0, 2.0);   // 2 cos(t)
  const double t = std::atan2(sin2t, cos2t);

  if (t < 1e-6) {
    return (0.5 * (1.0 + t * t / 12.0)) * anti;
  }
  if (t > kPi - 1e-6) {
    const double c = 0.5 * cos2t;
    const Mat3 outer = (0.5 * (m + m.transpose()) - c * Mat3::Identity()) / (1.0 - c);
    int j = 0;
    outer.diagonal().maxCoeff(&j);
    Vec3 axis = outer.col(j).normalized();
    if (sin2t > 1e-10) {
      if (anti.dot(axis) < 0.0) axis = -axis;
    } else {
      for (int k = 0; k < 3; ++k) {
        if (std::abs(axis[k]) > 1e-6) {
          if (axis[k] < 0.0) axis = -axis;
          break;
        }
      }
    }
    return t * axis;
  }
  return (t / sin2t) * anti;
}

/// Left Jacobian of exp_so3: V = I + B*K + C*K^2 with B = (1-cos t)/t^2 and
/// C = (t - sin t)/t^3. Maps tangent translations to group translations.
inline Mat3 left_jacobian_so3(const Vec3& w) {
  const double t2 = w.squaredNorm();
  const double t = std::sqrt(t2);
  double b, c;
  if (t < 1e-4) {
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    c = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
  } else {
    b = (1.0 - std::cos(t)) / t2;
    c = (t - std::sin(t)) / (t2 * t);
  }
  const Mat3 k = hat(w);
  return Mat3::Identity() + b * k + c * (k * k);
}

/// Right Jacobian of exp_so3: J_r(w) = left_jacobian_so3(-w).
inline Mat3 right_jacobian_so3(const Vec3& w) {
  return left_jacobian_so3(Vec3(-w));
}

/// Uniform draw on the unit 3-sphere (normalized Gaussian 4-vector).
/// Covers both hemispheres; canonicalize explicitly where that matters.
inline UnitQuaternion random_unit_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    RawQuaternion q{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    if (q.norm() > 1e-6) return UnitQuaternion::normalize(q);
  }
}

/// Haar-uniform random rotation (via the uniform quaternion draw).
inline RotationMatrix random_rotation(std::mt19937_64& rng) {
  return quat_to_matrix(random_unit_quaternion(rng));
}

inline RotationMatrix random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_rotation(rng);
}

}  // namespace posekit
