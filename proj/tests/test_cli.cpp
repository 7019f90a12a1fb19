#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "posekit/cli.hpp"

using namespace posekit;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("posekit_cli_test_" + name);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("dist subcommand prints distances as json", "[cli]") {
  const CliResult zero = run({"dist", "--kind", "geodesic", "--a", "identity", "--b", "identity"});
  REQUIRE(zero.code == 0);
  const ordered_json jz = ordered_json::parse(zero.out);
  CHECK(jz["kind"] == "geodesic");
  CHECK(jz["value"].get<double>() < 1e-12);

  const CliResult half_turn = run({"dist", "--kind", "chordal-so3", "--a", "identity",
                                   "--b", "-1,0,0,0,-1,0,0,0,1"});
  REQUIRE(half_turn.code == 0);
  const ordered_json jh = ordered_json::parse(half_turn.out);
  CHECK(jh["value"].get<double>() == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));

  const CliResult se3 = run({"dist", "--kind", "chordal-se3", "--a", "identity",
                             "--b", "1,0,0,1,0,1,0,2,0,0,1,0"});
  REQUIRE(se3.code == 0);
  const ordered_json js = ordered_json::parse(se3.out);
  CHECK(js["value"].get<double>() == Catch::Approx(std::sqrt(5.0)).margin(1e-12));
  REQUIRE(js.contains("coupled_value"));
  CHECK(js["coupled_value"].get<double>() == Catch::Approx(std::sqrt(5.0)).margin(1e-12));
}

TEST_CASE("convert subcommand maps between representations", "[cli]") {
  const CliResult quat = run({"convert", "--from", "euler", "--to", "quat",
                              "--values", "1.5707963267948966,0,0"});
  REQUIRE(quat.code == 0);
  const ordered_json jq = ordered_json::parse(quat.out);
  CHECK(jq["from"] == "euler");
  CHECK(jq["to"] == "quat");
  REQUIRE(jq["values"].size() == 4);
  CHECK(jq["values"][0].get<double>() == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
  CHECK(jq["values"][1].get<double>() == Catch::Approx(0.0).margin(1e-15));
  CHECK(jq["values"][2].get<double>() == Catch::Approx(0.0).margin(1e-15));
  CHECK(jq["values"][3].get<double>() == Catch::Approx(std::sqrt(0.5)).margin(1e-12));

  const CliResult euler = run({"convert", "--from", "matrix", "--to", "euler",
                               "--values", "identity"});
  REQUIRE(euler.code == 0);
  const ordered_json je = ordered_json::parse(euler.out);
  CHECK(je["gimbal_lock"] == false);
  for (const auto& v : je["values"]) CHECK(v.get<double>() == 0.0);
}

TEST_CASE("json output round-trips doubles exactly", "[cli]") {
  // axis -> quat, feed the printed quat back, expect the original axis.
  const CliResult to_quat = run({"convert", "--from", "axis", "--to", "quat",
                                 "--values", "0.2,0.1,-0.3"});
  REQUIRE(to_quat.code == 0);
  const ordered_json jq = ordered_json::parse(to_quat.out);
  std::ostringstream quat_csv;
  quat_csv.precision(17);
  quat_csv << jq["values"][0].get<double>() << ',' << jq["values"][1].get<double>() << ','
           << jq["values"][2].get<double>() << ',' << jq["values"][3].get<double>();
  const CliResult back = run({"convert", "--from", "quat", "--to", "axis",
                              "--values", quat_csv.str()});
  REQUIRE(back.code == 0);
  const ordered_json ja = ordered_json::parse(back.out);
  CHECK(ja["values"][0].get<double>() == Catch::Approx(0.2).margin(1e-12));
  CHECK(ja["values"][1].get<double>() == Catch::Approx(0.1).margin(1e-12));
  CHECK(ja["values"][2].get<double>() == Catch::Approx(-0.3).margin(1e-12));
}

TEST_CASE("axioms subcommand reports the failing quaternion identity", "[cli]") {
  const CliResult probe = run({"axioms", "--kind", "quat", "--trials", "2000", "--seed", "11"});
  REQUIRE(probe.code == 0);
  const ordered_json j = ordered_json::parse(probe.out);
  CHECK(j["distance"] == "quat");
  CHECK(j["trials"] == 2000);
  CHECK(j["axioms"]["non_negativity"]["status"] == "held");
  CHECK(j["axioms"]["symmetry"]["status"] == "held");
  CHECK(j["axioms"]["triangle_inequality"]["status"] == "held");
  CHECK(j["axioms"]["identity"]["status"] == "violated");
  REQUIRE(j["axioms"]["identity"].contains("counterexample"));
  CHECK(j["all_held"] == false);
}

TEST_CASE("eval subcommand summarizes trajectory error", "[cli]") {
  const fs::path gt_path = temp_file("gt.txt");
  const fs::path est_path = temp_file("est.txt");
  write_file(gt_path,
             "1 0 0 0 0 1 0 0 0 0 1 0\n"
             "1 0 0 1 0 1 0 0 0 0 1 0\n");
  write_file(est_path,
             "1 0 0 3 0 1 0 4 0 0 1 0\n"
             "1 0 0 4 0 1 0 4 0 0 1 0\n");
  const fs::path csv_path = temp_file("per_frame.csv");

  const CliResult res = run({"eval", "--gt", gt_path.string(), "--est", est_path.string(),
                             "--metric", "ape", "--mode", "trans",
                             "--per-frame-csv", csv_path.string()});
  REQUIRE(res.code == 0);
  CHECK(res.err.empty());
  const ordered_json j = ordered_json::parse(res.out);
  CHECK(j["rmse"].get<double>() == Catch::Approx(5.0).margin(1e-12));
  CHECK(j["count"] == 2);
  CHECK(read_file(csv_path) == "index,error\n0,5\n1,5\n");

  const CliResult rpe_res = run({"eval", "--gt", gt_path.string(), "--est", est_path.string(),
                                 "--metric", "rpe", "--mode", "trans", "--delta", "1"});
  REQUIRE(rpe_res.code == 0);
  const ordered_json jr = ordered_json::parse(rpe_res.out);
  CHECK(jr["count"] == 1);
  CHECK(jr["max"].get<double>() == Catch::Approx(0.0).margin(1e-12));

  fs::remove(gt_path);
  fs::remove(est_path);
  fs::remove(csv_path);
}

TEST_CASE("eval surfaces loader warnings and domain errors", "[cli]") {
  const fs::path gt_path = temp_file("gt_warn.txt");
  const fs::path est_path = temp_file("est_warn.txt");
  // Ground truth with a grossly non-orthonormal first block.
  write_file(gt_path, "1.0001 0 0 0 0 1 0 0 0 0 1 0\n");
  write_file(est_path, "1 0 0 0 0 1 0 0 0 0 1 0\n");
  const CliResult warn = run({"eval", "--gt", gt_path.string(), "--est", est_path.string(),
                              "--metric", "ape", "--mode", "trans"});
  REQUIRE(warn.code == 0);
  CHECK(warn.err.find("warning:") != std::string::npos);
  CHECK(warn.err.find("projected") != std::string::npos);

  // Mismatched lengths exit with the domain-error code and name the problem.
  write_file(est_path,
             "1 0 0 0 0 1 0 0 0 0 1 0\n"
             "1 0 0 1 0 1 0 0 0 0 1 0\n");
  const CliResult mismatch = run({"eval", "--gt", gt_path.string(), "--est", est_path.string(),
                                  "--metric", "ape", "--mode", "trans"});
  CHECK(mismatch.code == 2);
  CHECK(mismatch.err.find("LengthMismatch") != std::string::npos);

  fs::remove(gt_path);
  fs::remove(est_path);
}

TEST_CASE("fit subcommand streams a deterministic trace", "[cli]") {
  const std::vector<std::string> args = {"fit", "--loss", "se3", "--steps", "50",
                                         "--seed", "3", "--lr", "0.01"};
  const CliResult once = run(args);
  const CliResult twice = run(args);
  REQUIRE(once.code == 0);
  CHECK(once.out == twice.out);
  CHECK(once.out.rfind("kind,trial,step,loss,rot_err_rad,trans_err_m\n", 0) == 0);

  const fs::path trace_path = temp_file("trace.csv");
  std::vector<std::string> with_out = args;
  with_out.push_back("--out");
  with_out.push_back(trace_path.string());
  const CliResult filed = run(with_out);
  REQUIRE(filed.code == 0);
  const ordered_json j = ordered_json::parse(filed.out);
  CHECK(j["kind"] == "se3");
  CHECK(j["trace_csv"] == trace_path.string());
  CHECK(read_file(trace_path) == once.out);
  fs::remove(trace_path);
}

TEST_CASE("compare subcommand writes the table and one curve per loss", "[cli]") {
  const fs::path table_path = temp_file("table.json");
  const CliResult res = run({"compare", "--trials", "4", "--steps", "60", "--seed", "5",
                             "--angle-lo", "0.2", "--angle-hi", "1.2",
                             "--out", table_path.string()});
  REQUIRE(res.code == 0);
  CHECK(res.out == read_file(table_path));
  const ordered_json j = ordered_json::parse(res.out);
  REQUIRE(j["kinds"].size() == 3);
  CHECK(j["kinds"][0]["kind"] == "original");
  CHECK(j["kinds"][1]["kind"] == "quat");
  CHECK(j["kinds"][2]["kind"] == "se3");
  CHECK(j["config"]["trials"] == 4);

  for (const std::string kind : {"original", "quat", "se3"}) {
    const fs::path curve_path =
        table_path.parent_path() / (table_path.stem().string() + ".curves." + kind + ".csv");
    REQUIRE(fs::exists(curve_path));
    const std::string text = read_file(curve_path);
    CHECK(text.rfind("step,active,median_loss,median_rot_err_rad,median_trans_err_m\n", 0) == 0);
    fs::remove(curve_path);
  }
  fs::remove(table_path);
}

TEST_CASE("usage errors exit with code one", "[cli]") {
  const CliResult bad_kind = run({"dist", "--kind", "bogus", "--a", "identity",
                                  "--b", "identity"});
  CHECK(bad_kind.code == 1);
  CHECK_FALSE(bad_kind.err.empty());

  const CliResult short_values = run({"convert", "--from", "euler", "--to", "quat",
                                      "--values", "1,2"});
  CHECK(short_values.code == 1);
  CHECK(short_values.err.find("--values") != std::string::npos);

  const CliResult missing = run({"compare", "--trials", "4"});
  CHECK(missing.code == 1);

  const CliResult help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("posekit") != std::string::npos);
}

TEST_CASE("domain violations exit with code two", "[cli]") {
  const CliResult bad_matrix = run({"dist", "--kind", "geodesic", "--a", "identity",
                                    "--b", "5,0,0,0,5,0,0,0,5"});
  CHECK(bad_matrix.code == 2);
  CHECK(bad_matrix.err.find("error:") != std::string::npos);

  const CliResult zero_quat = run({"convert", "--from", "quat", "--to", "matrix",
                                   "--values", "0,0,0,0"});
  CHECK(zero_quat.code == 2);
  CHECK(zero_quat.err.find("ZeroQuaternion") != std::string::npos);
}
