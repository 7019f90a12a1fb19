#pragma once

// Convergence laboratory: plain gradient descent on a single random target
// pose under each rotation parameterization, with paired trials, per-step
// traces and a three-way comparison table. The lab minimizes the unweighted
// losses (weight 1), so step sizes mean the same thing across kinds.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "posekit/detail/numeric.hpp"
#include "posekit/errors.hpp"
#include "posekit/losses.hpp"
#include "posekit/metrics.hpp"
#include "posekit/poses.hpp"

namespace posekit {

enum class LossKind { original, quat, se3 };

inline const char* kind_name(LossKind k) {
  switch (k) {
    case LossKind::original: return "original";
    case LossKind::quat: return "quat";
    default: return "se3";
  }
}

inline LossKind kind_from_string(const std::string& name) {
  if (name == "original") return LossKind::original;
  if (name == "quat") return LossKind::quat;
  if (name == "se3") return LossKind::se3;
  throw std::invalid_argument("unknown loss kind: " + name);
}

/// Experiment parameters shared by fit and compare.
struct LabConfig {
  int trials = 100;
  int steps = 2000;         // gradient updates per trial
  double lr = 0.01;
  std::uint64_t seed = 0;
  double angle_lo = 0.0;    // target rotation angle range, within [0, pi]
  double angle_hi = kPi;
  double trans_range = 1.0; // target translation uniform in [-range, range]^3
  double tolerance = 0.01;  // geodesic convergence threshold, radians

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
    if (!(angle_lo >= 0.0 && angle_lo <= angle_hi && angle_hi <= kPi)) {
      throw std::invalid_argument("angle range must satisfy 0 <= lo <= hi <= pi");
    }
    if (!(trans_range >= 0.0)) throw std::invalid_argument("trans_range must be >= 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  }
};

/// Loss values above this are treated as divergence; the trial stops and is
/// reported with the diverged flag (data, not an error).
inline constexpr double kDivergenceGuard = 1e6;

struct FitRecord {
  int step = 0;
  double loss = 0.0;
  double rot_err_rad = 0.0;
  double trans_err_m = 0.0;
};

/// One gradient-descent run. records[s] describes the estimate before update
/// s, starting at the initial estimate (step 0); final_pose is the transform
/// of the last recorded estimate.
struct FitTrace {
  LossKind kind = LossKind::original;
  std::vector<FitRecord> records;
  bool converged = false;
  std::optional<int> steps_to_tolerance;
  bool diverged = false;
  Transform final_pose;
};

/// Random target: rotation angle uniform in [angle_lo, angle_hi) about a
/// uniform random axis, translation uniform in the cube. Draw order is fixed:
/// angle, axis, translation.
inline Transform sample_target(std::mt19937_64& rng, double angle_lo, double angle_hi,
                               double trans_range) {
  if (!(angle_lo >= 0.0 && angle_lo <= angle_hi && angle_hi <= kPi)) {
    throw std::invalid_argument("angle range must satisfy 0 <= lo <= hi <= pi");
  }
  if (!(trans_range >= 0.0)) throw std::invalid_argument("trans_range must be >= 0");
  double angle = angle_lo;
  if (angle_hi > angle_lo) {
    std::uniform_real_distribution<double> ua(angle_lo, angle_hi);
    angle = ua(rng);
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 axis;
  do {
    axis = Vec3(gauss(rng), gauss(rng), gauss(rng));
  } while (axis.norm() < 1e-6);
  axis.normalize();
  Vec3 t = Vec3::Zero();
  if (trans_range > 0.0) {
    std::uniform_real_distribution<double> ut(-trans_range, trans_range);
    t = Vec3(ut(rng), ut(rng), ut(rng));
  }
  return {exp_so3(angle * axis), t};
}

inline Transform sample_target(std::uint64_t seed, double angle_lo, double angle_hi,
                               double trans_range) {
  std::mt19937_64 rng(seed);
  return sample_target(rng, angle_lo, angle_hi, trans_range);
}

namespace lab_detail {

/// Chart an estimate for error measurement. A quaternion estimate that decayed
/// to zero norm cannot be charted; report the worst rotation error instead of
/// failing the trial (unreachable from identity initialization in practice).
inline Transform chart_or_worst(const Pose6& e, double*) { return pose6_to_transform(e); }
inline Transform chart_or_worst(const TangentPose& e, double*) { return tangent_to_transform(e); }
inline Transform chart_or_worst(const Pose7& e, double* rot_override) {
  if (e.q.norm() < 1e-12) {
    *rot_override = kPi;
    return {RotationMatrix::identity(), e.t};
  }
  return pose7_to_transform(e);
}

template <class E, class LossFn, class GradFn>
FitTrace run_descent(LossKind kind, const Transform& target, const LabConfig& cfg, E est,
                     LossFn&& loss, GradFn&& gradient) {
  FitTrace trace;
  trace.kind = kind;
  for (int step = 0;; ++step) {
    PoseBatch<E> batch({{target}}, {{est}});
    const double value = loss(batch);
    double rot_override = -1.0;
    const Transform current = chart_or_worst(est, &rot_override);
    const double rot =
        rot_override >= 0.0 ? rot_override : dist_geodesic(target.R, current.R);
    const double trans = (target.t - current.t).norm();
    trace.records.push_back({step, value, rot, trans});
    trace.final_pose = current;
    if (rot < cfg.tolerance) {
      trace.converged = true;
      trace.steps_to_tolerance = step;
      break;
    }
    if (value > kDivergenceGuard) {
      trace.diverged = true;
      break;
    }
    if (step == cfg.steps) break;
    const GradientArray grad = gradient(batch);
    for (int k = 0; k < EstimateTraits<E>::kParamCount; ++k) {
      EstimateTraits<E>::set(est, k, EstimateTraits<E>::get(est, k) - cfg.lr * grad[0][0][k]);
    }
  }
  return trace;
}

}  // namespace lab_detail

/// Gradient descent from the identity estimate of the chosen chart toward a
/// single target. Runs at most cfg.steps updates, stopping early once the
/// geodesic rotation error drops below cfg.tolerance or the loss passes the
/// divergence guard. The se3 kind uses the analytic gradient wherever it is
/// defined and falls back to finite differences beyond |omega| = pi - 1e-3.
inline FitTrace fit(LossKind kind, const Transform& target, const LabConfig& cfg) {
  cfg.validate();
  switch (kind) {
    case LossKind::original: {
      const auto loss = [](const PoseBatch<Pose6>& b) { return loss_original(b, 1.0); };
      const auto grad = [&](const PoseBatch<Pose6>& b) { return grad_fd(loss, b); };
      return lab_detail::run_descent(kind, target, cfg, Pose6{}, loss, grad);
    }
    case LossKind::quat: {
      const auto loss = [](const PoseBatch<Pose7>& b) { return loss_quat(b, 1.0); };
      const auto grad = [&](const PoseBatch<Pose7>& b) { return grad_fd(loss, b); };
      return lab_detail::run_descent(kind, target, cfg, Pose7{}, loss, grad);
    }
    default: {
      const auto loss = [](const PoseBatch<TangentPose>& b) { return loss_se3(b, 1.0); };
      const auto grad = [&](const PoseBatch<TangentPose>& b) {
        if (b.estimate(0, 0).omega.norm() < kPi - 1e-3) return grad_se3_analytic(b, 1.0);
        return grad_fd(loss, b);
      };
      return lab_detail::run_descent(kind, target, cfg, TangentPose{}, loss, grad);
    }
  }
}

/// One comparison-table row.
struct KindSummary {
  LossKind kind = LossKind::original;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> median_steps_to_tolerance;  // over converged trials
  int diverged = 0;
};

/// Median loss/errors at one step across the traces still active there.
struct CurvePoint {
  int step = 0;
  int active = 0;
  double median_loss = 0.0;
  double median_rot_err_rad = 0.0;
  double median_trans_err_m = 0.0;
};

struct CompareResult {
  LabConfig config;
  std::vector<KindSummary> table;                 // one row per kind
  std::vector<std::vector<CurvePoint>> curves;    // [kind][step]
  std::vector<std::vector<FitTrace>> traces;      // [kind][trial]
};

inline constexpr LossKind kAllKinds[] = {LossKind::original, LossKind::quat, LossKind::se3};

/// Runs all three kinds against the same per-trial targets (trial t draws its
/// target from a stream seeded by (seed, t), so runs are bit-reproducible and
/// the comparison is paired).
inline CompareResult compare(const LabConfig& cfg) {
  cfg.validate();
  CompareResult result;
  result.config = cfg;
  result.traces.resize(3);
  for (int trial = 0; trial < cfg.trials; ++trial) {
    std::mt19937_64 rng(detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const Transform target = sample_target(rng, cfg.angle_lo, cfg.angle_hi, cfg.trans_range);
    for (int k = 0; k < 3; ++k) {
      result.traces[k].push_back(fit(kAllKinds[k], target, cfg));
    }
  }
  for (int k = 0; k < 3; ++k) {
    const auto& traces = result.traces[k];
    KindSummary row;
    row.kind = kAllKinds[k];
    row.trials = cfg.trials;
    std::vector<double> steps_needed;
    std::size_t longest = 0;
    for (const FitTrace& t : traces) {
      if (t.converged) {
        ++row.successes;
        steps_needed.push_back(static_cast<double>(*t.steps_to_tolerance));
      }
      if (t.diverged) ++row.diverged;
      longest = std::max(longest, t.records.size());
    }
    row.success_rate = static_cast<double>(row.successes) / cfg.trials;
    if (!steps_needed.empty()) {
      row.median_steps_to_tolerance = detail::median(steps_needed);
    }
    result.table.push_back(row);

    std::vector<CurvePoint> curve;
    for (std::size_t s = 0; s < longest; ++s) {
      std::vector<double> losses, rots, transes;
      for (const FitTrace& t : traces) {
        if (s < t.records.size()) {
          losses.push_back(t.records[s].loss);
          rots.push_back(t.records[s].rot_err_rad);
          transes.push_back(t.records[s].trans_err_m);
        }
      }
      curve.push_back({static_cast<int>(s), static_cast<int>(losses.size()),
                       detail::median(losses), detail::median(rots), detail::median(transes)});
    }
    result.curves.push_back(std::move(curve));
  }
  return result;
}

/// CSV with columns kind,trial,step,loss,rot_err_rad,trans_err_m; numbers are
/// emitted with 17 significant digits so rereading them is lossless.
inline void write_traces_csv(std::ostream& out, const std::vector<FitTrace>& traces) {
  out << "kind,trial,step,loss,rot_err_rad,trans_err_m\n";
  for (std::size_t trial = 0; trial < traces.size(); ++trial) {
    const FitTrace& t = traces[trial];
    for (const FitRecord& r : t.records) {
      out << kind_name(t.kind) << ',' << trial << ',' << r.step << ','
          << detail::format_double17(r.loss) << ',' << detail::format_double17(r.rot_err_rad)
          << ',' << detail::format_double17(r.trans_err_m) << '\n';
    }
  }
}

inline void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "step,active,median_loss,median_rot_err_rad,median_trans_err_m\n";
  for (const CurvePoint& p : curve) {
    out << p.step << ',' << p.active << ',' << detail::format_double17(p.median_loss) << ','
        << detail::format_double17(p.median_rot_err_rad) << ','
        << detail::format_double17(p.median_trans_err_m) << '\n';
  }
}

inline nlohmann::ordered_json compare_table_json(const CompareResult& result) {
  nlohmann::ordered_json j;
  j["config"] = {{"trials", result.config.trials},   {"steps", result.config.steps},
                 {"lr", result.config.lr},           {"seed", result.config.seed},
                 {"angle_lo", result.config.angle_lo}, {"angle_hi", result.config.angle_hi},
                 {"trans_range", result.config.trans_range},
                 {"tolerance", result.config.tolerance}};
  j["kinds"] = nlohmann::ordered_json::array();
  for (const KindSummary& row : result.table) {
    nlohmann::ordered_json r;
    r["kind"] = kind_name(row.kind);
    r["trials"] = row.trials;
    r["successes"] = row.successes;
    r["success_rate"] = row.success_rate;
    if (row.median_steps_to_tolerance) {
      r["median_steps_to_tolerance"] = *row.median_steps_to_tolerance;
    } else {
      r["median_steps_to_tolerance"] = nullptr;
    }
    r["diverged"] = row.diverged;
    j["kinds"].push_back(r);
  }
  return j;
}

}  // namespace posekit
