#pragma once

// Command-line front end. run_cli is a plain function over argument strings
// and output streams so the whole surface is testable in-process; the binary
// in tools/ is a thin wrapper around it.
//
// Exit codes: 0 success, 1 usage errors (unknown flags, bad enum values,
// malformed --values), 2 data errors (validation and computation failures,
// printed verbatim from the underlying error).

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "posekit/convlab.hpp"
#include "posekit/errors.hpp"
#include "posekit/losses.hpp"
#include "posekit/metrics.hpp"
#include "posekit/poses.hpp"
#include "posekit/rotations.hpp"
#include "posekit/trajeval.hpp"

namespace posekit {

namespace cli_detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_csv(const std::string& text, std::size_t expected,
                                     const std::string& flag) {
  std::vector<double> values;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find(',', begin);
    if (end == std::string::npos) end = text.size();
    std::string token = text.substr(begin, end - begin);
    const std::size_t first = token.find_first_not_of(" \t");
    const std::size_t last = token.find_last_not_of(" \t");
    token = first == std::string::npos ? "" : token.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
      throw UsageError(flag + ": cannot parse '" + token + "' as a number");
    }
    values.push_back(v);
    begin = end + 1;
  }
  if (values.size() != expected) {
    throw UsageError(flag + ": expected " + std::to_string(expected) + " values, got " +
                     std::to_string(values.size()));
  }
  return values;
}

inline RotationMatrix rotation_from_csv(const std::string& text, const std::string& flag) {
  if (text == "identity") return RotationMatrix::identity();
  const std::vector<double> v = parse_csv(text, 9, flag);
  Mat3 m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return RotationMatrix(m);
}

inline Transform transform_from_csv(const std::string& text, const std::string& flag) {
  if (text == "identity") return Transform::identity();
  const std::vector<double> v = parse_csv(text, 12, flag);
  Mat3 m;
  m << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
  return {RotationMatrix(m), Vec3(v[3], v[7], v[11])};
}

inline nlohmann::ordered_json matrix_values(const RotationMatrix& r) {
  nlohmann::ordered_json values = nlohmann::ordered_json::array();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) values.push_back(r(i, j));
  return values;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  return out;
}

struct ConvertArgs {
  std::string from, to, values;
};

inline void run_convert(const ConvertArgs& a, std::ostream& out) {
  RotationMatrix r = RotationMatrix::identity();
  if (a.from == "euler") {
    const auto v = parse_csv(a.values, 3, "--values");
    r = euler_to_matrix({v[0], v[1], v[2]});
  } else if (a.from == "quat") {
    const auto v = parse_csv(a.values, 4, "--values");
    r = quat_to_matrix(UnitQuaternion::normalize({v[0], v[1], v[2], v[3]}));
  } else if (a.from == "matrix") {
    r = rotation_from_csv(a.values, "--values");
  } else {
    const auto v = parse_csv(a.values, 3, "--values");
    r = exp_so3(Vec3(v[0], v[1], v[2]));
  }

  nlohmann::ordered_json j;
  j["from"] = a.from;
  j["to"] = a.to;
  if (a.to == "euler") {
    const EulerChart chart = matrix_to_euler(r);
    j["values"] = {chart.angles.yaw, chart.angles.pitch, chart.angles.roll};
    j["gimbal_lock"] = chart.gimbal_lock;
  } else if (a.to == "quat") {
    const UnitQuaternion q = matrix_to_quat(r);
    j["values"] = {q.w(), q.x(), q.y(), q.z()};
  } else if (a.to == "matrix") {
    j["values"] = matrix_values(r);
  } else {
    const AxisVector w = log_so3(r);
    j["values"] = {w.x(), w.y(), w.z()};
  }
  out << j.dump(2) << '\n';
}

struct DistArgs {
  std::string kind, a, b;
};

inline void run_dist(const DistArgs& args, std::ostream& out) {
  nlohmann::ordered_json j;
  j["kind"] = args.kind;
  if (args.kind == "euler") {
    const auto va = parse_csv(args.a, 3, "--a");
    const auto vb = parse_csv(args.b, 3, "--b");
    j["value"] = dist_euler({va[0], va[1], va[2]}, {vb[0], vb[1], vb[2]});
  } else if (args.kind == "quat") {
    const auto va = parse_csv(args.a, 4, "--a");
    const auto vb = parse_csv(args.b, 4, "--b");
    j["value"] = dist_quat(UnitQuaternion::normalize({va[0], va[1], va[2], va[3]}),
                           UnitQuaternion::normalize({vb[0], vb[1], vb[2], vb[3]}));
  } else if (args.kind == "geodesic") {
    j["value"] = dist_geodesic(rotation_from_csv(args.a, "--a"),
                               rotation_from_csv(args.b, "--b"));
  } else if (args.kind == "chordal-so3") {
    j["value"] = dist_chordal_so3(rotation_from_csv(args.a, "--a"),
                                  rotation_from_csv(args.b, "--b"));
  } else {
    const Transform ta = transform_from_csv(args.a, "--a");
    const Transform tb = transform_from_csv(args.b, "--b");
    j["value"] = dist_chordal_se3(ta, tb);
    j["coupled_value"] = dist_chordal_se3_coupled(ta, tb);
  }
  out << j.dump(2) << '\n';
}

struct LabArgs {
  std::string loss = "se3";
  LabConfig config;
  std::string out_path;
};

inline void run_fit(const LabArgs& a, std::ostream& out) {
  std::mt19937_64 rng(detail::mix_seed(a.config.seed, 0));
  const Transform target =
      sample_target(rng, a.config.angle_lo, a.config.angle_hi, a.config.trans_range);
  const FitTrace trace = fit(kind_from_string(a.loss), target, a.config);
  if (a.out_path.empty()) {
    write_traces_csv(out, {trace});
    return;
  }
  std::ofstream file = open_output(a.out_path);
  write_traces_csv(file, {trace});
  const FitRecord& last = trace.records.back();
  nlohmann::ordered_json j;
  j["kind"] = kind_name(trace.kind);
  j["converged"] = trace.converged;
  if (trace.steps_to_tolerance) {
    j["steps_to_tolerance"] = *trace.steps_to_tolerance;
  } else {
    j["steps_to_tolerance"] = nullptr;
  }
  j["diverged"] = trace.diverged;
  j["records"] = trace.records.size();
  j["final_loss"] = last.loss;
  j["final_rot_err_rad"] = last.rot_err_rad;
  j["final_trans_err_m"] = last.trans_err_m;
  j["trace_csv"] = a.out_path;
  out << j.dump(2) << '\n';
}

inline void run_compare(const LabArgs& a, std::ostream& out) {
  const CompareResult result = compare(a.config);
  const nlohmann::ordered_json table = compare_table_json(result);
  std::ofstream file = open_output(a.out_path);
  file << table.dump(2) << '\n';
  const std::filesystem::path out_path(a.out_path);
  for (int k = 0; k < 3; ++k) {
    const std::string name =
        out_path.stem().string() + ".curves." + kind_name(kAllKinds[k]) + ".csv";
    const std::filesystem::path curve_path = out_path.parent_path() / name;
    std::ofstream curve_file = open_output(curve_path.string());
    write_curve_csv(curve_file, result.curves[k]);
  }
  out << table.dump(2) << '\n';
}

struct EvalArgs {
  std::string gt, est, metric, mode;
  std::size_t delta = 1;
  std::string per_frame_csv;
};

inline void run_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  const Trajectory gt = load_kitti_file(a.gt, &warnings);
  const Trajectory est = load_kitti_file(a.est, &warnings);
  for (const std::string& w : warnings) err << "warning: " << w << '\n';
  const ErrorMode mode = mode_from_string(a.mode);
  const std::vector<double> errors = a.metric == "ape"
                                         ? ape_errors(gt, est, mode)
                                         : rpe_errors(gt, est, a.delta, mode);
  if (!a.per_frame_csv.empty()) {
    std::ofstream csv = open_output(a.per_frame_csv);
    write_per_frame_csv(csv, errors);
  }
  out << stats_from(errors).to_json().dump(2) << '\n';
}

}  // namespace cli_detail

/// Parses and executes one invocation. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pose representations, rotation metrics and convergence experiments"};
  app.name("posekit");
  app.require_subcommand(1);

  const std::vector<std::string> reps = {"euler", "quat", "matrix", "axis"};
  const std::vector<std::string> dist_kinds = {"euler", "quat", "geodesic", "chordal-so3",
                                               "chordal-se3"};
  const std::vector<std::string> loss_kinds = {"original", "quat", "se3"};

  cli_detail::ConvertArgs convert_args;
  CLI::App* convert = app.add_subcommand("convert", "Convert a rotation between representations");
  convert->add_option("--from", convert_args.from, "Input representation")
      ->required()
      ->check(CLI::IsMember(reps));
  convert->add_option("--to", convert_args.to, "Output representation")
      ->required()
      ->check(CLI::IsMember(reps));
  convert->add_option("--values", convert_args.values,
                      "Comma-separated input values (euler: yaw,pitch,roll; quat: w,x,y,z; "
                      "matrix: 9 row-major; axis: 3)")
      ->required();

  cli_detail::DistArgs dist_args;
  CLI::App* dist = app.add_subcommand("dist", "Distance between two rotations or poses");
  dist->add_option("--kind", dist_args.kind, "Distance kind")
      ->required()
      ->check(CLI::IsMember(dist_kinds));
  dist->add_option("--a", dist_args.a, "First operand ('identity' or comma-separated values)")
      ->required();
  dist->add_option("--b", dist_args.b, "Second operand ('identity' or comma-separated values)")
      ->required();

  std::string axiom_kind;
  int axiom_trials = 10000;
  std::uint64_t axiom_seed = 0;
  double axiom_tolerance = 1e-9;
  CLI::App* axioms = app.add_subcommand("axioms", "Probe the metric axioms of a distance");
  axioms->add_option("--kind", axiom_kind, "Distance kind")
      ->required()
      ->check(CLI::IsMember(dist_kinds));
  axioms->add_option("--trials", axiom_trials, "Random trials")->check(CLI::PositiveNumber);
  axioms->add_option("--seed", axiom_seed, "RNG seed");
  axioms->add_option("--tolerance", axiom_tolerance, "Axiom tolerance");

  const auto add_lab_options = [](CLI::App* cmd, cli_detail::LabArgs& a) {
    cmd->add_option("--steps", a.config.steps, "Gradient updates per trial");
    cmd->add_option("--lr", a.config.lr, "Learning rate");
    cmd->add_option("--seed", a.config.seed, "RNG seed");
    cmd->add_option("--angle-lo", a.config.angle_lo, "Target angle range, lower bound");
    cmd->add_option("--angle-hi", a.config.angle_hi, "Target angle range, upper bound");
    cmd->add_option("--trans-range", a.config.trans_range, "Target translation cube half-width");
    cmd->add_option("--tol", a.config.tolerance, "Convergence threshold (geodesic radians)");
  };

  cli_detail::LabArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Gradient descent toward one sampled target");
  fit_cmd->add_option("--loss", fit_args.loss, "Loss kind")
      ->required()
      ->check(CLI::IsMember(loss_kinds));
  add_lab_options(fit_cmd, fit_args);
  fit_cmd->add_option("--out", fit_args.out_path, "Trace CSV path (default: stdout)");

  cli_detail::LabArgs compare_args;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Paired three-way convergence comparison");
  compare_cmd->add_option("--trials", compare_args.config.trials, "Number of random targets")
      ->check(CLI::PositiveNumber);
  add_lab_options(compare_cmd, compare_args);
  compare_cmd->add_option("--out", compare_args.out_path,
                          "Table JSON path; curve CSVs are written next to it")
      ->required();

  cli_detail::EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Trajectory error against ground truth");
  eval_cmd->add_option("--gt", eval_args.gt, "Ground-truth KITTI file")->required();
  eval_cmd->add_option("--est", eval_args.est, "Estimated KITTI file")->required();
  eval_cmd->add_option("--metric", eval_args.metric, "ape or rpe")
      ->required()
      ->check(CLI::IsMember({"ape", "rpe"}));
  eval_cmd->add_option("--mode", eval_args.mode, "trans or rot")
      ->required()
      ->check(CLI::IsMember({"trans", "rot"}));
  eval_cmd->add_option("--delta", eval_args.delta, "Frame step for rpe")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--per-frame-csv", eval_args.per_frame_csv,
                       "Optional per-frame error CSV path");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("posekit");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 1;
  }

  try {
    if (app.got_subcommand(convert)) {
      cli_detail::run_convert(convert_args, out);
    } else if (app.got_subcommand(dist)) {
      cli_detail::run_dist(dist_args, out);
    } else if (app.got_subcommand(axioms)) {
      out << run_axiom_probe(axiom_kind, axiom_trials, axiom_seed, axiom_tolerance).dump(2)
          << '\n';
    } else if (app.got_subcommand(fit_cmd)) {
      cli_detail::run_fit(fit_args, out);
    } else if (app.got_subcommand(compare_cmd)) {
      cli_detail::run_compare(compare_args, out);
    } else if (app.got_subcommand(eval_cmd)) {
      cli_detail::run_eval(eval_args, out, err);
    }
  } catch (const cli_detail::UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace posekit
