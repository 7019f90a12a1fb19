#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace posekit {

/// Base class for all recoverable posekit errors. what() always starts with the
/// concrete error name so callers (and the CLI) can surface it verbatim.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// vee() received a matrix whose antisymmetry defect exceeds tolerance.
class NotSkew : public Error {
 public:
  explicit NotSkew(const std::string& detail) : Error("NotSkew: " + detail) {}
};

/// A quaternion with (near-)zero norm cannot be normalized into a rotation.
class ZeroQuaternion : public Error {
 public:
  explicit ZeroQuaternion(const std::string& detail) : Error("ZeroQuaternion: " + detail) {}
};

/// log_se3 requires the rotation angle to stay below pi - 1e-6.
class NearPiRotation : public Error {
 public:
  explicit NearPiRotation(const std::string& detail) : Error("NearPiRotation: " + detail) {}
};

/// The analytic rotation gradient is undefined for estimates with ||omega|| >= pi - 1e-3.
class NearPiEstimate : public Error {
 public:
  explicit NearPiEstimate(const std::string& detail) : Error("NearPiEstimate: " + detail) {}
};

/// A loss over Euler charts cannot represent a target at the gimbal singularity.
class GimbalLockTarget : public Error {
 public:
  explicit GimbalLockTarget(const std::string& detail) : Error("GimbalLockTarget: " + detail) {}
};

/// A parsed rotation block is not a proper rotation (det <= 0).
class InvalidRotation : public Error {
 public:
  explicit InvalidRotation(const std::string& detail) : Error("InvalidRotation: " + detail) {}
};

/// Two trajectories that must align frame-by-frame have different lengths.
class LengthMismatch : public Error {
 public:
  explicit LengthMismatch(const std::string& detail) : Error("LengthMismatch: " + detail) {}
};

/// A relative-pose frame step exceeds the trajectory length.
class DeltaTooLarge : public Error {
 public:
  explicit DeltaTooLarge(const std::string& detail) : Error("DeltaTooLarge: " + detail) {}
};

/// Malformed input text; carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("ParseError: line " + std::to_string(line) + ": " + reason), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A fit trial whose loss exploded past the divergence guard. Reported, not thrown,
/// inside the lab (a diverged trial is data, not a failure); thrown only if a caller
/// asks for a converged result that does not exist.
class DivergedLoss : public Error {
 public:
  explicit DivergedLoss(const std::string& detail) : Error("DivergedLoss: " + detail) {}
};

}  // namespace posekit
