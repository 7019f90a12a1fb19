#pragma once

// Trajectory evaluation: KITTI-style pose files, absolute pose error (APE)
// and relative pose error (RPE) with summary statistics.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "posekit/detail/numeric.hpp"
#include "posekit/errors.hpp"
#include "posekit/metrics.hpp"
#include "posekit/poses.hpp"

namespace posekit {

struct Trajectory {
  std::vector<Transform> poses;

  std::size_t size() const { return poses.size(); }
  bool empty() const { return poses.empty(); }
};

namespace traj_detail {

inline double parse_double(const std::string& token, std::size_t line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, "invalid number '" + token + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line, "non-finite number '" + token + "'");
  }
  return value;
}

}  // namespace traj_detail

/// Reads KITTI odometry format: one pose per line as the 12 row-major entries
/// of the 3x4 matrix [R | t]. Blank lines and lines starting with '#' are
/// skipped; anything else must parse to exactly 12 finite numbers. Rotation
/// blocks with nonpositive determinant raise InvalidRotation; blocks whose
/// orthonormality defect exceeds 1e-6 are projected to the nearest rotation
/// and reported through `warnings` (smaller defects are repaired silently so
/// the RotationMatrix invariant holds exactly).
inline Trajectory load_kitti(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string token;
    std::vector<double> values;
    bool comment = false;
    while (tokens >> token) {
      if (values.empty() && token.front() == '#') {
        comment = true;
        break;
      }
      values.push_back(traj_detail::parse_double(token, line_no));
    }
    if (comment || values.empty()) continue;
    if (values.size() != 12) {
      throw ParseError(line_no, "expected 12 values, got " + std::to_string(values.size()));
    }
    Mat3 r;
    r << values[0], values[1], values[2],
         values[4], values[5], values[6],
         values[8], values[9], values[10];
    const Vec3 t(values[3], values[7], values[11]);
    const double det = r.determinant();
    if (det <= 0.0) {
      throw InvalidRotation("line " + std::to_string(line_no) + ": determinant " +
                            std::to_string(det) + " is not positive");
    }
    const double defect = rotation_defect(r);
    if (defect > 1e-9) {
      if (defect > 1e-6 && warnings != nullptr) {
        std::ostringstream msg;
        msg << "line " << line_no << ": orthonormality defect " << defect
            << " exceeds 1e-6; projected to the nearest rotation";
        warnings->push_back(msg.str());
      }
      r = project_to_rotation(r);
    }
    traj.poses.push_back({RotationMatrix(r), t});
  }
  return traj;
}

inline Trajectory load_kitti_file(const std::string& path,
                                  std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory file: " + path);
  return load_kitti(in, warnings);
}

/// Writes KITTI format with 17 significant digits, so save/load round-trips
/// every pose bit-exactly.
inline void save_kitti(std::ostream& out, const Trajectory& traj) {
  for (const Transform& pose : traj.poses) {
    const Mat3& r = pose.R.matrix();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        out << detail::format_double17(r(i, j)) << ' ';
      }
      out << detail::format_double17(pose.t[i]);
      out << (i == 2 ? '\n' : ' ');
    }
  }
}

enum class ErrorMode { translation, rotation };

inline ErrorMode mode_from_string(const std::string& name) {
  if (name == "trans") return ErrorMode::translation;
  if (name == "rot") return ErrorMode::rotation;
  throw std::invalid_argument("unknown error mode: " + name);
}

/// Summary of a per-frame error sequence.
struct ErrorStats {
  double rmse = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  nlohmann::ordered_json to_json() const {
    return {{"rmse", rmse}, {"mean", mean}, {"median", median},
            {"min", min},   {"max", max},   {"count", count}};
  }
};

inline ErrorStats stats_from(const std::vector<double>& errors) {
  if (errors.empty()) throw std::invalid_argument("cannot summarize an empty error sequence");
  ErrorStats s;
  s.count = errors.size();
  std::vector<double> squares(errors.size());
  std::transform(errors.begin(), errors.end(), squares.begin(),
                 [](double e) { return e * e; });
  s.rmse = std::sqrt(detail::pairwise_sum(squares) / errors.size());
  s.mean = detail::pairwise_sum(errors) / errors.size();
  s.median = detail::median(errors);
  s.min = *std::min_element(errors.begin(), errors.end());
  s.max = *std::max_element(errors.begin(), errors.end());
  return s;
}

namespace traj_detail {

inline void require_same_length(const Trajectory& gt, const Trajectory& est) {
  if (gt.size() != est.size()) {
    throw LengthMismatch("ground truth has " + std::to_string(gt.size()) +
                         " poses, estimate has " + std::to_string(est.size()));
  }
  if (gt.empty()) throw std::invalid_argument("trajectories must be non-empty");
}

inline double frame_error(const Transform& a, const Transform& b, ErrorMode mode) {
  if (mode == ErrorMode::translation) return (relative(a, b).t).norm();
  return dist_geodesic(a.R, b.R);
}

}  // namespace traj_detail

/// Per-frame absolute pose errors: frame i compares gt_i with est_i through
/// the relative transform gt_i^-1 est_i (translation norm or geodesic angle).
inline std::vector<double> ape_errors(const Trajectory& gt, const Trajectory& est,
                                      ErrorMode mode) {
  traj_detail::require_same_length(gt, est);
  std::vector<double> errors;
  errors.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    errors.push_back(traj_detail::frame_error(gt.poses[i], est.poses[i], mode));
  }
  return errors;
}

inline ErrorStats ape(const Trajectory& gt, const Trajectory& est, ErrorMode mode) {
  return stats_from(ape_errors(gt, est, mode));
}

/// Per-frame relative pose errors over a frame step delta: compares the motion
/// gt_i -> gt_{i+delta} against est_i -> est_{i+delta}. Invariant under any
/// rigid transform applied to a whole trajectory from the left.
inline std::vector<double> rpe_errors(const Trajectory& gt, const Trajectory& est,
                                      std::size_t delta, ErrorMode mode) {
  traj_detail::require_same_length(gt, est);
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (delta >= gt.size()) {
    throw DeltaTooLarge("delta " + std::to_string(delta) + " needs trajectories longer than " +
                        std::to_string(gt.size()) + " poses");
  }
  std::vector<double> errors;
  errors.reserve(gt.size() - delta);
  for (std::size_t i = 0; i + delta < gt.size(); ++i) {
    const Transform gt_motion = relative(gt.poses[i], gt.poses[i + delta]);
    const Transform est_motion = relative(est.poses[i], est.poses[i + delta]);
    errors.push_back(traj_detail::frame_error(gt_motion, est_motion, mode));
  }
  return errors;
}

inline ErrorStats rpe(const Trajectory& gt, const Trajectory& est, std::size_t delta,
                      ErrorMode mode) {
  return stats_from(rpe_errors(gt, est, delta, mode));
}

/// CSV with columns index,error (17 significant digits).
inline void write_per_frame_csv(std::ostream& out, const std::vector<double>& errors) {
  out << "index,error\n";
  for (std::size_t i = 0; i < errors.size(); ++i) {
    out << i << ',' << detail::format_double17(errors[i]) << '\n';
  }
}

}  // namespace posekit
