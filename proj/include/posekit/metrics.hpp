#pragma once

// Distances between rotations/poses across representations, and a randomized
// probe that checks the four metric axioms (non-negativity, identity of
// indiscernibles, symmetry, triangle inequality) and records counterexamples.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "posekit/poses.hpp"
#include "posekit/rotations.hpp"

namespace posekit {

/// Plain Euclidean distance between Euler triplets, read as R^3 coordinates.
/// Not a metric on rotations: distinct triplets can name one rotation.
inline double dist_euler(const EulerAngles& a, const EulerAngles& b) {
  const double dy = a.yaw - b.yaw;
  const double dp = a.pitch - b.pitch;
  const double dr = a.roll - b.roll;
  return std::sqrt(dy * dy + dp * dp + dr * dr);
}

/// Double-cover-aware coordinate distance: min over the sign ambiguity.
/// A pseudo-metric on quaternion coordinates; q and -q are at distance 0.
inline double dist_quat(const RawQuaternion& a, const RawQuaternion& b) {
  const auto norm4 = [](double w, double x, double y, double z) {
    return std::sqrt(w * w + x * x + y * y + z * z);
  };
  const double minus = norm4(a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z);
  const double plus = norm4(a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z);
  return std::min(minus, plus);
}

inline double dist_quat(const UnitQuaternion& a, const UnitQuaternion& b) {
  return dist_quat(a.raw(), b.raw());
}

/// Geodesic (angular) distance on SO(3), in [0, pi]. Computed through the
/// logarithm of the relative rotation, which stays accurate near 0 where the
/// arccos-of-trace route loses half the significant digits.
inline double dist_geodesic(const RotationMatrix& a, const RotationMatrix& b) {
  const RotationMatrix rel(Mat3(a.matrix().transpose() * b.matrix()));
  return log_so3(rel).norm();
}

/// Trace route for the same distance: arccos((tr(a^T b) - 1)/2), clamped.
/// Kept as an independent cross-check; agrees with dist_geodesic away from pi
/// but is intrinsically ~1e-8-grainy at both ends of [0, pi].
inline double dist_geodesic_trace(const RotationMatrix& a, const RotationMatrix& b) {
  const double tr = (a.matrix().transpose() * b.matrix()).trace();
  return std::acos(std::clamp(0.5 * (tr - 1.0), -1.0, 1.0));
}

/// Chordal distance on SO(3): Frobenius norm of the difference, in [0, 2*sqrt(2)].
inline double dist_chordal_so3(const RotationMatrix& a, const RotationMatrix& b) {
  return (a.matrix() - b.matrix()).norm();
}

/// Chordal distance on SE(3): Frobenius norm of the difference of the 4x4
/// homogeneous forms. Expands to sqrt(dist_chordal_so3^2 + |t_a - t_b|^2).
inline double dist_chordal_se3(const Transform& a, const Transform& b) {
  return (a.homogeneous() - b.homogeneous()).norm();
}

/// Diagnostic variant that couples translation to the second rotation:
/// sqrt(dist_chordal_so3^2 + |t_b - R_b t_a|^2). Not the homogeneous-difference
/// distance (and not symmetric); exposed to quantify how far it strays.
inline double dist_chordal_se3_coupled(const Transform& a, const Transform& b) {
  const double dr = dist_chordal_so3(a.R, b.R);
  const double dt = (b.t - b.R.matrix() * a.t).norm();
  return std::sqrt(dr * dr + dt * dt);
}

enum class AxiomStatus { held, violated };

inline const char* to_string(AxiomStatus s) {
  return s == AxiomStatus::held ? "held" : "violated";
}

/// Concrete witness of a failed axiom check: the offending inputs plus the
/// distance values that broke the inequality.
template <class E>
struct Counterexample {
  std::string check;
  std::vector<E> inputs;
  nlohmann::ordered_json values;
};

template <class E>
struct AxiomFinding {
  AxiomStatus status = AxiomStatus::held;
  std::optional<Counterexample<E>> counterexample;
};

/// A distance under test, bundled with its samplers and the equivalence that
/// says when two elements name the same underlying rotation/pose. The pair
/// sampler is expected to mix in equivalent-but-distinct pairs so the probe
/// can catch identity-of-indiscernibles failures.
template <class E>
struct ProbeSubject {
  std::string name;
  std::function<double(const E&, const E&)> distance;
  std::function<E(std::mt19937_64&)> sample;
  std::function<std::pair<E, E>(std::mt19937_64&)> sample_pair;
  std::function<bool(const E&, const E&)> equivalent;
  std::function<nlohmann::ordered_json(const E&)> describe;
};

template <class E>
struct AxiomProbeResult {
  std::string distance_name;
  int trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  AxiomFinding<E> non_negativity;
  AxiomFinding<E> identity;
  AxiomFinding<E> symmetry;
  AxiomFinding<E> triangle;
  std::function<nlohmann::ordered_json(const E&)> describe;

  bool all_held() const {
    return non_negativity.status == AxiomStatus::held &&
           identity.status == AxiomStatus::held &&
           symmetry.status == AxiomStatus::held &&
           triangle.status == AxiomStatus::held;
  }

  nlohmann::ordered_json report() const {
    const auto finding_json = [this](const AxiomFinding<E>& f) {
      nlohmann::ordered_json j;
      j["status"] = to_string(f.status);
      if (f.counterexample) {
        nlohmann::ordered_json cex;
        cex["check"] = f.counterexample->check;
        cex["inputs"] = nlohmann::ordered_json::array();
        for (const E& e : f.counterexample->inputs) cex["inputs"].push_back(describe(e));
        cex["values"] = f.counterexample->values;
        j["counterexample"] = cex;
      }
      return j;
    };
    nlohmann::ordered_json j;
    j["distance"] = distance_name;
    j["trials"] = trials;
    j["seed"] = seed;
    j["tolerance"] = tolerance;
    j["axioms"] = {{"non_negativity", finding_json(non_negativity)},
                   {"identity", finding_json(identity)},
                   {"symmetry", finding_json(symmetry)},
                   {"triangle_inequality", finding_json(triangle)}};
    j["all_held"] = all_held();
    return j;
  }
};

/// Randomized metric-axiom probe. Runs `trials` rounds on a serial seeded
/// engine (each round draws one pair and one extra element, so the stream
/// shape is fixed) and keeps the first counterexample per axiom. Identity is
/// checked as a biconditional against the subject's equivalence.
template <class E>
AxiomProbeResult<E> axiom_probe(const ProbeSubject<E>& subject, int trials,
                                std::uint64_t seed, double tolerance = 1e-9) {
  AxiomProbeResult<E> result;
  result.distance_name = subject.name;
  result.trials = trials;
  result.seed = seed;
  result.tolerance = tolerance;
  result.describe = subject.describe;

  const auto record = [](AxiomFinding<E>& f, const std::string& check,
                         std::vector<E> inputs, nlohmann::ordered_json values) {
    if (f.status == AxiomStatus::violated) return;
    f.status = AxiomStatus::violated;
    f.counterexample = Counterexample<E>{check, std::move(inputs), std::move(values)};
  };

  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    auto [a, b] = subject.sample_pair(rng);
    const E c = subject.sample(rng);
    const double daa = subject.distance(a, a);
    const double dab = subject.distance(a, b);
    const double dba = subject.distance(b, a);
    const double dac = subject.distance(a, c);
    const double dbc = subject.distance(b, c);

    if (daa < -tolerance) {
      record(result.non_negativity, "d(a,a) >= 0", {a}, {{"d(a,a)", daa}});
    }
    if (dab < -tolerance) {
      record(result.non_negativity, "d(a,b) >= 0", {a, b}, {{"d(a,b)", dab}});
    }

    if (daa > tolerance) {
      record(result.identity, "d(a,a) == 0", {a}, {{"d(a,a)", daa}});
    }
    const bool equiv = subject.equivalent(a, b);
    if (dab <= tolerance && !equiv) {
      record(result.identity, "zero distance between non-equivalent elements", {a, b},
             {{"d(a,b)", dab}});
    }
    if (dab > tolerance && equiv) {
      record(result.identity, "nonzero distance between equivalent elements", {a, b},
             {{"d(a,b)", dab}});
    }

    if (std::abs(dab - dba) > tolerance) {
      record(result.symmetry, "d(a,b) == d(b,a)", {a, b},
             {{"d(a,b)", dab}, {"d(b,a)", dba}});
    }

    if (dac > dab + dbc + tolerance) {
      record(result.triangle, "d(a,c) <= d(a,b) + d(b,c)", {a, b, c},
             {{"d(a,c)", dac}, {"d(a,b)", dab}, {"d(b,c)", dbc}});
    }
  }
  return result;
}

namespace probe_detail {

inline EulerAngles sample_euler(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> full(-kPi, kPi);
  std::uniform_real_distribution<double> half(-kPi / 2, kPi / 2);
  EulerAngles e;
  e.yaw = full(rng);
  e.pitch = half(rng);
  e.roll = full(rng);
  return e;
}

inline bool same_rotation(const RotationMatrix& a, const RotationMatrix& b) {
  return dist_geodesic(a, b) < 1e-9;
}

inline nlohmann::ordered_json describe_euler(const EulerAngles& e) {
  return {{"yaw", e.yaw}, {"pitch", e.pitch}, {"roll", e.roll}};
}

inline nlohmann::ordered_json describe_quat(const RawQuaternion& q) {
  return {{"w", q.w}, {"x", q.x}, {"y", q.y}, {"z", q.z}};
}

inline nlohmann::ordered_json describe_rotation(const RotationMatrix& r) {
  nlohmann::ordered_json row_major = nlohmann::ordered_json::array();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) row_major.push_back(r(i, j));
  return {{"matrix", row_major}};
}

inline nlohmann::ordered_json describe_transform(const Transform& t) {
  nlohmann::ordered_json j = describe_rotation(t.R);
  j["translation"] = {t.t.x(), t.t.y(), t.t.z()};
  return j;
}

}  // namespace probe_detail

/// Euler-triplet subject. One pair in four lies on a gimbal family: at
/// pitch = +pi/2 the rotation depends only on yaw - roll (on yaw + roll at
/// -pi/2), so (yaw+d, roll+-d) names the same rotation at coordinate
/// distance d*sqrt(2). Equivalence compares the converted rotations.
inline ProbeSubject<EulerAngles> make_euler_subject() {
  ProbeSubject<EulerAngles> s;
  s.name = "euler";
  s.distance = [](const EulerAngles& a, const EulerAngles& b) { return dist_euler(a, b); };
  s.sample = probe_detail::sample_euler;
  s.sample_pair = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> selector(0.0, 1.0);
    if (selector(rng) < 0.25) {
      std::uniform_real_distribution<double> full(-kPi, kPi);
      std::uniform_real_distribution<double> offset(0.05, 0.5);
      const bool up = selector(rng) < 0.5;
      const double yaw = full(rng), roll = full(rng), d = offset(rng);
      const double pitch = up ? kPi / 2 : -kPi / 2;
      EulerAngles a{yaw, pitch, roll};
      EulerAngles b{yaw + d, pitch, up ? roll + d : roll - d};
      return std::make_pair(a, b);
    }
    auto a = probe_detail::sample_euler(rng);
    auto b = probe_detail::sample_euler(rng);
    return std::make_pair(a, b);
  };
  s.equivalent = [](const EulerAngles& a, const EulerAngles& b) {
    return probe_detail::same_rotation(euler_to_matrix(a), euler_to_matrix(b));
  };
  s.describe = probe_detail::describe_euler;
  return s;
}

/// Unit-quaternion subject. One pair in four is antipodal (q, -q): the same
/// rotation, but equivalence here is componentwise coordinate equality, so a
/// zero distance across the double cover trips the identity axiom.
inline ProbeSubject<RawQuaternion> make_quat_subject() {
  ProbeSubject<RawQuaternion> s;
  s.name = "quat";
  s.distance = [](const RawQuaternion& a, const RawQuaternion& b) { return dist_quat(a, b); };
  s.sample = [](std::mt19937_64& rng) { return random_unit_quaternion(rng).raw(); };
  s.sample_pair = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> selector(0.0, 1.0);
    const RawQuaternion a = random_unit_quaternion(rng).raw();
    if (selector(rng) < 0.25) return std::make_pair(a, a.negated());
    return std::make_pair(a, random_unit_quaternion(rng).raw());
  };
  s.equivalent = [](const RawQuaternion& a, const RawQuaternion& b) {
    return std::abs(a.w - b.w) <= 1e-12 && std::abs(a.x - b.x) <= 1e-12 &&
           std::abs(a.y - b.y) <= 1e-12 && std::abs(a.z - b.z) <= 1e-12;
  };
  s.describe = probe_detail::describe_quat;
  return s;
}

namespace probe_detail {

/// Shared sampler for rotation-matrix subjects: one pair in eight is an exact
/// duplicate, one in eight a quaternion round-trip of the same rotation
/// (distinct bits, equivalent rotation), the rest independent draws.
inline std::pair<RotationMatrix, RotationMatrix> sample_rotation_pair(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> selector(0.0, 1.0);
  const RotationMatrix a = random_rotation(rng);
  const double pick = selector(rng);
  if (pick < 0.125) return {a, a};
  if (pick < 0.25) return {a, quat_to_matrix(matrix_to_quat(a))};
  return {a, random_rotation(rng)};
}

}  // namespace probe_detail

inline ProbeSubject<RotationMatrix> make_geodesic_subject() {
  ProbeSubject<RotationMatrix> s;
  s.name = "geodesic";
  s.distance = [](const RotationMatrix& a, const RotationMatrix& b) {
    return dist_geodesic(a, b);
  };
  s.sample = [](std::mt19937_64& rng) { return random_rotation(rng); };
  s.sample_pair = probe_detail::sample_rotation_pair;
  s.equivalent = probe_detail::same_rotation;
  s.describe = probe_detail::describe_rotation;
  return s;
}

inline ProbeSubject<RotationMatrix> make_chordal_so3_subject() {
  ProbeSubject<RotationMatrix> s;
  s.name = "chordal-so3";
  s.distance = [](const RotationMatrix& a, const RotationMatrix& b) {
    return dist_chordal_so3(a, b);
  };
  s.sample = [](std::mt19937_64& rng) { return random_rotation(rng); };
  s.sample_pair = probe_detail::sample_rotation_pair;
  s.equivalent = probe_detail::same_rotation;
  s.describe = probe_detail::describe_rotation;
  return s;
}

inline ProbeSubject<Transform> make_chordal_se3_subject() {
  ProbeSubject<Transform> s;
  s.name = "chordal-se3";
  s.distance = [](const Transform& a, const Transform& b) { return dist_chordal_se3(a, b); };
  s.sample = [](std::mt19937_64& rng) { return random_transform(rng); };
  s.sample_pair = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> selector(0.0, 1.0);
    const Transform a = random_transform(rng);
    if (selector(rng) < 0.25) return std::make_pair(a, a);
    return std::make_pair(a, random_transform(rng));
  };
  s.equivalent = [](const Transform& a, const Transform& b) {
    return probe_detail::same_rotation(a.R, b.R) && (a.t - b.t).norm() < 1e-9;
  };
  s.describe = probe_detail::describe_transform;
  return s;
}

/// Name-keyed probe runner for the CLI: euler, quat, geodesic, chordal-so3,
/// chordal-se3. Throws std::invalid_argument for unknown names.
inline nlohmann::ordered_json run_axiom_probe(const std::string& kind, int trials,
                                              std::uint64_t seed, double tolerance = 1e-9) {
  if (kind == "euler") return axiom_probe(make_euler_subject(), trials, seed, tolerance).report();
  if (kind == "quat") return axiom_probe(make_quat_subject(), trials, seed, tolerance).report();
  if (kind == "geodesic")
    return axiom_probe(make_geodesic_subject(), trials, seed, tolerance).report();
  if (kind == "chordal-so3")
    return axiom_probe(make_chordal_so3_subject(), trials, seed, tolerance).report();
  if (kind == "chordal-se3")
    return axiom_probe(make_chordal_se3_subject(), trials, seed, tolerance).report();
  throw std::invalid_argument("unknown distance kind: " + kind);
}

}  // namespace posekit
