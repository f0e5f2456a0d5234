#include <cmath>
#include <fstream>
#include <string>

#include "doctest.h"
#include "entwit/io.hpp"
#include "entwit/linalg.hpp"
#include "entwit/types.hpp"
#include "test_helpers.hpp"

using namespace entwit;
using namespace entwit::testing;

namespace {

Real value_after(const std::string& output, const std::string& key) {
  const std::size_t at = output.find(key);
  REQUIRE(at != std::string::npos);
  return std::stod(output.substr(at + key.size()));
}

/// Writes a trace-0.9 two-qubit diagonal matrix file.
std::string write_bad_trace_file() {
  const std::string path = "/tmp/entwit_cli_bad_trace.json";
  ComplexMatrix m = 0.225 * ComplexMatrix::Identity(4, 4);
  save_matrix_file(path, MatrixFile{{2, 2}, m, "bad-trace"});
  return path;
}

/// Writes the sign-swapped (invalid) 24 x 24 multiplier file.
std::string write_invalid_multiplier_file() {
  const std::string path = "/tmp/entwit_cli_bad_multiplier.json";
  ComplexMatrix p = ComplexMatrix::Identity(24, 24);
  p.bottomRightCorner(12, 12) *= -1.0;
  save_matrix_file(path, MatrixFile{{24}, p, "swapped"});
  return path;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("solve detects the maximally entangled fixture") {
  const CliResult r =
      run_cli("solve --input " + data_path("bell_state.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("ENTANGLED value=") != std::string::npos);
  CHECK(std::abs(value_after(r.output, "value=") - (-0.18301270)) < 1e-3);
}

TEST_CASE("solve stays inconclusive on the separable fixture") {
  const CliResult r =
      run_cli("solve --input " + data_path("isospectral_separable.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("INCONCLUSIVE value=") != std::string::npos);
}

TEST_CASE("malformed inputs exit with the input-error code") {
  const CliResult bad_trace =
      run_cli("solve --input " + write_bad_trace_file());
  CHECK(bad_trace.exit_code == 2);
  CHECK(bad_trace.output.find("trace") != std::string::npos);

  std::ofstream("/tmp/entwit_cli_garbage.json") << "{ not json";
  const CliResult garbage =
      run_cli("solve --input /tmp/entwit_cli_garbage.json");
  CHECK(garbage.exit_code == 2);

  const CliResult missing = run_cli("solve --input /tmp/entwit_no_file.json");
  CHECK(missing.exit_code == 2);

  const CliResult no_sub = run_cli("");
  CHECK(no_sub.exit_code == 2);

  const CliResult bad_method = run_cli(
      "solve --method nonsense --input " + data_path("bell_state.json"));
  CHECK(bad_method.exit_code == 2);
}

TEST_CASE("ppt classifies the fixtures") {
  const CliResult bell = run_cli("ppt --input " + data_path("bell_state.json"));
  CHECK(bell.exit_code == 0);
  CHECK(bell.output.find("NPT min_eig=") != std::string::npos);
  CHECK(std::abs(value_after(bell.output, "min_eig=") - (-0.5)) < 1e-9);

  const CliResult sigma =
      run_cli("ppt --input " + data_path("isospectral_separable.json"));
  CHECK(sigma.exit_code == 0);
  CHECK(sigma.output.find("PPT") != std::string::npos);
  CHECK(sigma.output.find("NPT") == std::string::npos);
}

TEST_CASE("verify accepts the stored witness against its target state") {
  const CliResult r =
      run_cli("verify " + data_path("witness_isospectral.json") + " " +
              data_path("isospectral_entangled.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("PASS") != std::string::npos);
  CHECK(std::abs(value_after(r.output, "objective=") - (-0.0313)) < 1e-4);
  CHECK(value_after(r.output, "seesaw_min=") >= -1e-7);
}

TEST_CASE("verify accepts the corner witness against the entangled state") {
  const CliResult r = run_cli("verify " + data_path("witness_bell_oew.json") +
                              " " + data_path("bell_state.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("PASS") != std::string::npos);
  CHECK(std::abs(value_after(r.output, "objective=") - (-0.5)) < 1e-9);
}

TEST_CASE("verify rejects a witness with no negative eigenvalue") {
  const std::string path = "/tmp/entwit_cli_mixed_witness.json";
  save_matrix_file(path, MatrixFile{{2, 2},
                                    0.25 * ComplexMatrix::Identity(4, 4),
                                    "mixed"});
  const CliResult r =
      run_cli("verify " + path + " " + data_path("bell_state.json"));
  CHECK(r.exit_code == 5);
  CHECK(r.output.find("FAIL") != std::string::npos);
  CHECK(r.output.find("negative eigenvalue") != std::string::npos);
}

TEST_CASE("solve writes identical reports across runs, wall time aside") {
  const std::string out1 = "/tmp/entwit_cli_report1.json";
  const std::string out2 = "/tmp/entwit_cli_report2.json";
  const std::string cmd =
      "solve --input " + data_path("bell_state.json") + " --output ";
  CHECK(run_cli(cmd + out1).exit_code == 0);
  CHECK(run_cli(cmd + out2).exit_code == 0);

  ReportFile r1 = read_report_file(out1);
  ReportFile r2 = read_report_file(out2);
  CHECK(r1.method == "theorem2");
  CHECK(r1.verdict == VerdictKind::Entangled);
  CHECK(r1.status == "optimal");
  CHECK(r1.value == r2.value);
  CHECK(r1.duality_gap == r2.duality_gap);
  CHECK(r1.iterations == r2.iterations);
  REQUIRE(r1.witness.has_value());
  REQUIRE(r2.witness.has_value());
  CHECK((r1.witness->matrix - r2.witness->matrix).cwiseAbs().maxCoeff() ==
        0.0);
  REQUIRE(r1.seesaw_value.has_value());
  CHECK(*r1.seesaw_value == *r2.seesaw_value);
  CHECK(*r1.seesaw_value >= -1e-7);
  // Byte-identical after blanking the only timing-dependent field.
  r1.wall_time_ms = 0;
  r2.wall_time_ms = 0;
  CHECK(write_report_file(r1) == write_report_file(r2));

  // The stored witness is itself a valid input witness for verify.
  const std::string wpath = "/tmp/entwit_cli_report_witness.json";
  save_matrix_file(wpath, *r1.witness);
  const CliResult v =
      run_cli("verify " + wpath + " " + data_path("bell_state.json"));
  CHECK(v.exit_code == 0);
}

TEST_CASE("the multiplier relaxation runs through the CLI") {
  const CliResult plain = run_cli("solve --method sprocedure --input " +
                                  data_path("bell_state.json"));
  CHECK(plain.exit_code == 0);
  CHECK(plain.output.find("INCONCLUSIVE value=0") != std::string::npos);

  const CliResult designed = run_cli(
      "solve --method sprocedure --input " + data_path("bell_state.json") +
      " --multiplier " + data_path("multiplier_designed.json"));
  CHECK(designed.exit_code == 0);
  CHECK(designed.output.find("INCONCLUSIVE value=") != std::string::npos);
  CHECK(std::abs(value_after(designed.output, "value=") - 0.24677305) < 1e-4);
}

TEST_CASE("an invalid multiplier is refused with its own exit code") {
  const CliResult r = run_cli(
      "solve --method sprocedure --input " + data_path("bell_state.json") +
      " --multiplier " + write_invalid_multiplier_file());
  CHECK(r.exit_code == 4);
  CHECK(r.output.find("multiplier") != std::string::npos);
}

TEST_CASE("cut detection runs on the three-party fixture") {
  const std::string out = "/tmp/entwit_cli_ghz_report.json";
  const CliResult r = run_cli("solve --method cuts --input " +
                              data_path("ghz_state.json") + " --output " + out);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("ENTANGLED value=") != std::string::npos);
  CHECK(std::abs(value_after(r.output, "value=") - (-0.18301270)) < 1e-3);
  const ReportFile report = read_report_file(out);
  CHECK(report.method == "cuts");
  REQUIRE(report.witness.has_value());
  CHECK(report.witness->dims == std::vector<Index>{2, 4});

  // A bipartite state has no non-trivial cuts to scan.
  const CliResult bi = run_cli("solve --method cuts --input " +
                               data_path("bell_state.json"));
  CHECK(bi.exit_code == 2);
}

TEST_SUITE_END();
