#pragma once

// Batch regression losses over pose targets, one per rotation representation,
// plus gradients: central finite differences for every chart and an analytic
// path for the exponential-coordinates loss.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "posekit/detail/numeric.hpp"
#include "posekit/errors.hpp"
#include "posekit/metrics.hpp"
#include "posekit/poses.hpp"

namespace posekit {

/// Rotation-term weights. Defaults balance translation (meters) against the
/// squared rotation residual of each representation.
struct LossWeights {
  double k1 = 100.0;  // Euler-angle loss
  double k2 = 14.0;   // quaternion loss
  double k3 = 153.0;  // chordal SE(3) loss
};

namespace detail {

inline void require_positive_weight(double k, const char* name) {
  if (!(k > 0.0)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

}  // namespace detail

/// N x M grid of pose targets with one estimate per target. N indexes
/// observations, M sequence steps; the loss averages over N only.
template <class EstimateT>
class PoseBatch {
 public:
  PoseBatch(std::vector<std::vector<Transform>> targets,
            std::vector<std::vector<EstimateT>> estimates)
      : targets_(std::move(targets)), estimates_(std::move(estimates)) {
    if (targets_.empty() || targets_.front().empty()) {
      throw std::invalid_argument("batch must have N >= 1 and M >= 1");
    }
    const std::size_t m = targets_.front().size();
    if (estimates_.size() != targets_.size()) {
      throw std::invalid_argument("estimate rows do not match target rows");
    }
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      if (targets_[i].size() != m || estimates_[i].size() != m) {
        throw std::invalid_argument("batch rows must all have length M");
      }
    }
  }

  int observations() const { return static_cast<int>(targets_.size()); }
  int sequence_length() const { return static_cast<int>(targets_.front().size()); }

  const Transform& target(int i, int j) const { return targets_[i][j]; }
  const EstimateT& estimate(int i, int j) const { return estimates_[i][j]; }
  EstimateT& estimate(int i, int j) { return estimates_[i][j]; }

 private:
  std::vector<std::vector<Transform>> targets_;
  std::vector<std::vector<EstimateT>> estimates_;
};

namespace detail {

/// Sums per-term values pairwise and divides by the observation count, so
/// concatenating batches along N gives the N-weighted mean of the parts.
template <class TermFn>
double reduce_terms(int n, int m, TermFn&& term) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) terms.push_back(term(i, j));
  return pairwise_sum(terms) / n;
}

}  // namespace detail

/// Euler-chart loss: mean over observations of
/// sum_j |t - t_hat|^2 + k1 * |phi - phi_hat|^2, with phi the target's Z-Y-X
/// angles. Throws GimbalLockTarget when a target cannot be charted uniquely.
inline double loss_original(const PoseBatch<Pose6>& batch, double k1 = LossWeights{}.k1) {
  detail::require_positive_weight(k1, "k1");
  const int n = batch.observations(), m = batch.sequence_length();
  std::vector<std::vector<EulerAngles>> target_angles(n);
  for (int i = 0; i < n; ++i) {
    target_angles[i].reserve(m);
    for (int j = 0; j < m; ++j) {
      const EulerChart chart = matrix_to_euler(batch.target(i, j).R);
      if (chart.gimbal_lock) {
        throw GimbalLockTarget("target (" + std::to_string(i) + ", " + std::to_string(j) +
                               ") sits at the Euler chart singularity");
      }
      target_angles[i].push_back(chart.angles);
    }
  }
  return detail::reduce_terms(n, m, [&](int i, int j) {
    const Transform& target = batch.target(i, j);
    const Pose6& est = batch.estimate(i, j);
    const double dt = (target.t - est.t).squaredNorm();
    const double dphi = dist_euler(target_angles[i][j], est.angles);
    return dt + k1 * dphi * dphi;
  });
}

/// Quaternion loss: translation term plus k2 * min over the sign ambiguity of
/// |q - b*q_hat|^2, with q the target's canonical quaternion and q_hat the raw
/// estimate coordinates. Invariant under q_hat -> -q_hat by construction.
inline double loss_quat(const PoseBatch<Pose7>& batch, double k2 = LossWeights{}.k2) {
  detail::require_positive_weight(k2, "k2");
  return detail::reduce_terms(batch.observations(), batch.sequence_length(), [&](int i, int j) {
    const Transform& target = batch.target(i, j);
    const Pose7& est = batch.estimate(i, j);
    const RawQuaternion q = matrix_to_quat(target.R).raw();
    const double dt = (target.t - est.t).squaredNorm();
    const double dq = dist_quat(q, est.q);
    return dt + k2 * dq * dq;
  });
}

/// Exponential-coordinates loss: translation term plus
/// k3 * dist_chordal_so3(R, exp_so3(omega_hat))^2.
inline double loss_se3(const PoseBatch<TangentPose>& batch, double k3 = LossWeights{}.k3) {
  detail::require_positive_weight(k3, "k3");
  return detail::reduce_terms(batch.observations(), batch.sequence_length(), [&](int i, int j) {
    const Transform& target = batch.target(i, j);
    const TangentPose& est = batch.estimate(i, j);
    const double dt = (target.t - est.t).squaredNorm();
    const double dc = dist_chordal_so3(target.R, exp_so3(est.omega));
    return dt + k3 * dc * dc;
  });
}

/// Flat parameter access per estimate chart, for finite differencing and
/// gradient-descent updates. Layouts put translation first.
template <class EstimateT>
struct EstimateTraits;

template <>
struct EstimateTraits<Pose6> {
  static constexpr int kParamCount = 6;  // [tx, ty, tz, yaw, pitch, roll]
  static double get(const Pose6& p, int k) {
    switch (k) {
      case 0: return p.t.x();
      case 1: return p.t.y();
      case 2: return p.t.z();
      case 3: return p.angles.yaw;
      case 4: return p.angles.pitch;
      default: return p.angles.roll;
    }
  }
  static void set(Pose6& p, int k, double v) {
    switch (k) {
      case 0: p.t.x() = v; break;
      case 1: p.t.y() = v; break;
      case 2: p.t.z() = v; break;
      case 3: p.angles.yaw = v; break;
      case 4: p.angles.pitch = v; break;
      default: p.angles.roll = v; break;
    }
  }
};

template <>
struct EstimateTraits<Pose7> {
  static constexpr int kParamCount = 7;  // [tx, ty, tz, qw, qx, qy, qz]
  static double get(const Pose7& p, int k) {
    switch (k) {
      case 0: return p.t.x();
      case 1: return p.t.y();
      case 2: return p.t.z();
      case 3: return p.q.w;
      case 4: return p.q.x;
      case 5: return p.q.y;
      default: return p.q.z;
    }
  }
  static void set(Pose7& p, int k, double v) {
    switch (k) {
      case 0: p.t.x() = v; break;
      case 1: p.t.y() = v; break;
      case 2: p.t.z() = v; break;
      case 3: p.q.w = v; break;
      case 4: p.q.x = v; break;
      case 5: p.q.y = v; break;
      default: p.q.z = v; break;
    }
  }
};

template <>
struct EstimateTraits<TangentPose> {
  static constexpr int kParamCount = 6;  // [tx, ty, tz, wx, wy, wz]
  static double get(const TangentPose& p, int k) {
    switch (k) {
      case 0: return p.t.x();
      case 1: return p.t.y();
      case 2: return p.t.z();
      case 3: return p.omega.x();
      case 4: return p.omega.y();
      default: return p.omega.z();
    }
  }
  static void set(TangentPose& p, int k, double v) {
    switch (k) {
      case 0: p.t.x() = v; break;
      case 1: p.t.y() = v; break;
      case 2: p.t.z() = v; break;
      case 3: p.omega.x() = v; break;
      case 4: p.omega.y() = v; break;
      default: p.omega.z() = v; break;
    }
  }
};

/// Gradient per batch entry, matching the batch shape: element (i, j) holds
/// the partials with respect to that estimate's parameters.
using GradientArray = std::vector<std::vector<Eigen::VectorXd>>;

/// Central finite differences of an arbitrary batch loss, (L(x+h)-L(x-h))/2h
/// per parameter. The batch is taken by value; the caller's copy is untouched.
template <class EstimateT, class LossFn>
GradientArray grad_fd(LossFn&& loss, PoseBatch<EstimateT> batch, double h = 1e-5) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  constexpr int kParams = EstimateTraits<EstimateT>::kParamCount;
  const int n = batch.observations(), m = batch.sequence_length();
  GradientArray grad(n);
  for (int i = 0; i < n; ++i) {
    grad[i].assign(m, Eigen::VectorXd::Zero(kParams));
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < kParams; ++k) {
        const double center = EstimateTraits<EstimateT>::get(batch.estimate(i, j), k);
        EstimateTraits<EstimateT>::set(batch.estimate(i, j), k, center + h);
        const double plus = loss(batch);
        EstimateTraits<EstimateT>::set(batch.estimate(i, j), k, center - h);
        const double minus = loss(batch);
        EstimateTraits<EstimateT>::set(batch.estimate(i, j), k, center);
        grad[i][j][k] = (plus - minus) / (2.0 * h);
      }
    }
  }
  return grad;
}

/// Analytic gradient of loss_se3. Per entry, with Q = R^T exp(omega_hat):
///   d/dt_hat     = 2 (t_hat - t) / N
///   d/domega_hat = (2 k3 / N) * J_r(omega_hat)^T vee(Q - Q^T)
/// Valid while |omega_hat| < pi - 1e-3 (J_r well conditioned); throws
/// NearPiEstimate beyond that.
inline GradientArray grad_se3_analytic(const PoseBatch<TangentPose>& batch,
                                       double k3 = LossWeights{}.k3) {
  detail::require_positive_weight(k3, "k3");
  const int n = batch.observations(), m = batch.sequence_length();
  GradientArray grad(n);
  for (int i = 0; i < n; ++i) {
    grad[i].assign(m, Eigen::VectorXd::Zero(6));
    for (int j = 0; j < m; ++j) {
      const TangentPose& est = batch.estimate(i, j);
      const double angle = est.omega.norm();
      if (angle >= kPi - 1e-3) {
        throw NearPiEstimate("estimate (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") has |omega| = " + std::to_string(angle));
      }
      const Transform& target = batch.target(i, j);
      const Mat3 q = target.R.matrix().transpose() * exp_so3(est.omega).matrix();
      const Vec3 rot_grad =
          (2.0 * k3 / n) * (right_jacobian_so3(est.omega).transpose() * vee(q - q.transpose()));
      Eigen::VectorXd g(6);
      g.head<3>() = (2.0 / n) * (est.t - target.t);
      g.tail<3>() = rot_grad;
      grad[i][j] = g;
    }
  }
  return grad;
}

}  // namespace posekit
