#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "posekit/trajeval.hpp"

using namespace posekit;

namespace {

Trajectory random_trajectory(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  Trajectory traj;
  for (std::size_t i = 0; i < n; ++i) traj.poses.push_back(random_transform(rng));
  return traj;
}

Trajectory left_multiplied(const Transform& g, const Trajectory& traj) {
  Trajectory out;
  for (const Transform& p : traj.poses) out.poses.push_back(compose(g, p));
  return out;
}

std::string row12(const Mat3& r, const Vec3& t) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (int i = 0; i < 3; ++i) {
    out << r(i, 0) << ' ' << r(i, 1) << ' ' << r(i, 2) << ' ' << t[i];
    out << (i == 2 ? "" : " ");
  }
  return out.str();
}

}  // namespace

TEST_CASE("kitti loader reads poses and skips comments and blanks", "[trajeval]") {
  std::istringstream in(
      "# a comment\n"
      "\n"
      "1 0 0 0 0 1 0 0 0 0 1 0\n"
      "1 0 0 1.5 0 1 0 -2.5 0 0 1 3\n"
      "0 -1 0 0.25\t1 0 0 0\t0 0 1 0\n");
  const Trajectory traj = load_kitti(in);
  REQUIRE(traj.size() == 3);
  CHECK((traj.poses[0].R.matrix() - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(traj.poses[0].t.norm() == 0.0);
  CHECK(traj.poses[1].t[0] == 1.5);
  CHECK(traj.poses[1].t[1] == -2.5);
  CHECK(traj.poses[1].t[2] == 3.0);
  CHECK((traj.poses[2].R.matrix() - rot_z(kPi / 2).matrix()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(traj.poses[2].t[0] == 0.25);
}

TEST_CASE("kitti loader reports parse failures with line numbers", "[trajeval]") {
  {
    std::istringstream in("# header\n\n1 0 0 0 0 1 0 0 0 0 1\n");
    try {
      load_kitti(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("expected 12 values, got 11") != std::string::npos);
    }
  }
  {
    std::istringstream in("1 0 0 zero 0 1 0 0 0 0 1 0\n");
    try {
      load_kitti(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(std::string(e.what()).find("invalid number 'zero'") != std::string::npos);
    }
  }
  {
    std::istringstream in("1 0 0 1.5x 0 1 0 0 0 0 1 0\n");
    CHECK_THROWS_AS(load_kitti(in), ParseError);
  }
  {
    std::istringstream in("inf 0 0 0 0 1 0 0 0 0 1 0\n");
    CHECK_THROWS_AS(load_kitti(in), ParseError);
  }
}

TEST_CASE("kitti loader rejects reflections", "[trajeval]") {
  std::istringstream in("1 0 0 0 0 1 0 0 0 0 -1 0\n");
  CHECK_THROWS_AS(load_kitti(in), InvalidRotation);
}

TEST_CASE("kitti loader repairs near-rotations and warns on gross ones", "[trajeval]") {
  Mat3 slight = rot_z(0.3).matrix();
  slight(0, 1) += 5e-8;
  Mat3 gross = rot_z(0.3).matrix();
  gross(0, 1) += 5e-5;
  REQUIRE(rotation_defect(slight) > 1e-9);
  REQUIRE(rotation_defect(slight) <= 1e-6);
  REQUIRE(rotation_defect(gross) > 1e-6);

  std::istringstream in(row12(slight, Vec3::Zero()) + "\n" + row12(gross, Vec3(1, 2, 3)) + "\n");
  std::vector<std::string> warnings;
  const Trajectory traj = load_kitti(in, &warnings);
  REQUIRE(traj.size() == 2);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("line 2") != std::string::npos);
  CHECK(warnings[0].find("projected") != std::string::npos);
  for (const Transform& p : traj.poses) {
    CHECK(rotation_defect(p.R.matrix()) <= 1e-9);
  }
  CHECK(dist_geodesic(traj.poses[1].R, rot_z(0.3)) < 1e-4);

  // Without a warning sink the gross case still loads.
  std::istringstream again(row12(gross, Vec3::Zero()) + "\n");
  CHECK(load_kitti(again).size() == 1);
}

TEST_CASE("kitti save and load round-trips bit-exactly", "[trajeval]") {
  const Trajectory traj = random_trajectory(500, 25);
  std::ostringstream out;
  save_kitti(out, traj);
  std::istringstream in(out.str());
  const Trajectory back = load_kitti(in);
  REQUIRE(back.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK((back.poses[i].R.matrix().array() == traj.poses[i].R.matrix().array()).all());
    CHECK((back.poses[i].t.array() == traj.poses[i].t.array()).all());
  }
}

TEST_CASE("absolute error vanishes when the estimate matches", "[trajeval]") {
  const Trajectory gt = random_trajectory(501, 40);
  for (ErrorMode mode : {ErrorMode::translation, ErrorMode::rotation}) {
    const ErrorStats s = ape(gt, gt, mode);
    CHECK(s.count == 40);
    CHECK(s.max < 1e-7);
  }
}

TEST_CASE("absolute error isolates a constant world offset", "[trajeval]") {
  const Trajectory gt = random_trajectory(502, 60);
  const Transform shift{RotationMatrix::identity(), Vec3(3, 4, 0)};
  const Trajectory est = left_multiplied(shift, gt);

  const ErrorStats trans = ape(gt, est, ErrorMode::translation);
  CHECK(trans.rmse == Catch::Approx(5.0).margin(1e-9));
  CHECK(trans.mean == Catch::Approx(5.0).margin(1e-9));
  CHECK(trans.median == Catch::Approx(5.0).margin(1e-9));
  CHECK(trans.min == Catch::Approx(5.0).margin(1e-9));
  CHECK(trans.max == Catch::Approx(5.0).margin(1e-9));
  CHECK(ape(gt, est, ErrorMode::rotation).max < 1e-7);

  // A fixed rotation error on every frame shows up only in rotation mode.
  Trajectory rotated = gt;
  for (Transform& p : rotated.poses) {
    p.R = RotationMatrix(p.R.matrix() * rot_z(0.1).matrix());
  }
  const ErrorStats rot = ape(gt, rotated, ErrorMode::rotation);
  CHECK(rot.min == Catch::Approx(0.1).margin(1e-9));
  CHECK(rot.max == Catch::Approx(0.1).margin(1e-9));
  CHECK(ape(gt, rotated, ErrorMode::translation).max == 0.0);
}

TEST_CASE("relative error ignores the global frame", "[trajeval]") {
  const Trajectory gt = random_trajectory(503, 30);
  const Trajectory est = random_trajectory(504, 30);
  std::mt19937_64 rng(505);
  const Transform g = random_transform(rng);
  const Trajectory est_moved = left_multiplied(g, est);

  for (ErrorMode mode : {ErrorMode::translation, ErrorMode::rotation}) {
    const std::vector<double> base = rpe_errors(gt, est, 3, mode);
    const std::vector<double> moved = rpe_errors(gt, est_moved, 3, mode);
    REQUIRE(base.size() == moved.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      REQUIRE(moved[i] == Catch::Approx(base[i]).margin(1e-9));
    }
    CHECK(rpe(gt, gt, 3, mode).max < 1e-7);
  }
}

TEST_CASE("relative error measures per-step drift", "[trajeval]") {
  Trajectory gt, est;
  for (int i = 0; i <= 100; ++i) {
    gt.poses.push_back({RotationMatrix::identity(), Vec3(i, 0, 0)});
    est.poses.push_back({RotationMatrix::identity(), Vec3(1.01 * i, 0, 0)});
  }
  const ErrorStats step1 = rpe(gt, est, 1, ErrorMode::translation);
  CHECK(step1.count == 100);
  CHECK(step1.rmse == Catch::Approx(0.01).margin(1e-12));
  CHECK(step1.mean == Catch::Approx(0.01).margin(1e-12));
  const ErrorStats step5 = rpe(gt, est, 5, ErrorMode::translation);
  CHECK(step5.count == 96);
  CHECK(step5.rmse == Catch::Approx(0.05).margin(1e-12));
  CHECK(rpe(gt, est, 1, ErrorMode::rotation).max == 0.0);

  CHECK(rpe_errors(gt, est, 100, ErrorMode::translation).size() == 1);
  CHECK_THROWS_AS(rpe(gt, est, 101, ErrorMode::translation), DeltaTooLarge);
  CHECK_THROWS_AS(rpe(gt, est, 0, ErrorMode::translation), std::invalid_argument);
}

TEST_CASE("length mismatches and empty inputs are rejected", "[trajeval]") {
  const Trajectory a = random_trajectory(506, 5);
  const Trajectory b = random_trajectory(507, 6);
  CHECK_THROWS_AS(ape(a, b, ErrorMode::translation), LengthMismatch);
  CHECK_THROWS_AS(rpe(a, b, 1, ErrorMode::translation), LengthMismatch);
  const Trajectory empty;
  CHECK_THROWS_AS(ape(empty, empty, ErrorMode::translation), std::invalid_argument);
  CHECK_THROWS_AS(stats_from({}), std::invalid_argument);
}

TEST_CASE("summary statistics are internally consistent", "[trajeval]") {
  const ErrorStats frozen = stats_from({3.0, 4.0});
  CHECK(frozen.mean == Catch::Approx(3.5).margin(1e-15));
  CHECK(frozen.median == Catch::Approx(3.5).margin(1e-15));
  CHECK(frozen.rmse == Catch::Approx(std::sqrt(12.5)).margin(1e-15));
  CHECK(frozen.min == 3.0);
  CHECK(frozen.max == 4.0);
  CHECK(frozen.count == 2);

  std::mt19937_64 rng(508);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> errors;
  for (int i = 0; i < 101; ++i) errors.push_back(u(rng));
  const ErrorStats s = stats_from(errors);
  CHECK(s.min <= s.median);
  CHECK(s.median <= s.max);
  CHECK(s.mean <= s.rmse + 1e-15);
  CHECK(s.count == 101);

  const nlohmann::ordered_json j = s.to_json();
  const auto keys = {"rmse", "mean", "median", "min", "max", "count"};
  std::size_t pos = 0;
  for (const auto& [key, value] : j.items()) {
    CHECK(key == *(keys.begin() + pos));
    ++pos;
  }
}

TEST_CASE("per-frame errors export as indexed csv", "[trajeval]") {
  std::ostringstream out;
  write_per_frame_csv(out, {0.5, 0.25});
  CHECK(out.str() == "index,error\n0,0.5\n1,0.25\n");

  const Trajectory gt = random_trajectory(509, 8);
  const Trajectory est = random_trajectory(510, 8);
  const std::vector<double> errors = ape_errors(gt, est, ErrorMode::rotation);
  REQUIRE(errors.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(errors[i] == dist_geodesic(gt.poses[i].R, est.poses[i].R));
  }
}
