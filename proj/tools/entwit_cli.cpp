// Command-line front end: reads states and multipliers from matrix files,
// runs a detection method or a diagnostic, and emits verdicts, witnesses and
// certificates as files and one-line console output.
//
// Exit codes: 0 success; 2 malformed or invalid input; 3 solver failure;
// 4 invalid multiplier; 5 witness verification failure.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entwit/io.hpp"
#include "entwit/linalg.hpp"
#include "entwit/multipartite.hpp"
#include "entwit/sprocedure.hpp"
#include "entwit/witness.hpp"

namespace {

using namespace entwit;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitBadMultiplier = 4;
constexpr int kExitVerifyFailure = 5;

std::string format_value(Real x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

std::string status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::Optimal: return "optimal";
    case SolverStatus::Infeasible: return "infeasible";
    case SolverStatus::MaxIterations: return "max-iterations";
    case SolverStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

struct SolveOptions {
  std::string input;
  std::string output;
  std::string method = "theorem2";
  std::string multiplier_path;
  Real gap_tol = SolverSettings{}.gap_tol;
  Real detect_eps = tol::detect_eps;
  std::uint64_t seed = 0;
  int samples = 200;
};

Multiplier load_multiplier(const SolveOptions& opt, Index dA, Index dB) {
  const Index n = multiplier_block_size(dA, dB);
  if (opt.multiplier_path.empty()) return simple_multiplier(n);

  const MatrixFile file = read_matrix_file(opt.multiplier_path);
  if (file.matrix.rows() != 2 * n)
    throw MultiplierError(
        "multiplier: expected a " + std::to_string(2 * n) + "x" +
        std::to_string(2 * n) + " matrix for this state, got " +
        std::to_string(file.matrix.rows()) + "x" +
        std::to_string(file.matrix.cols()));
  ComplexMatrix p;
  try {
    p = to_hermitian(file).matrix();
  } catch (const InvariantError& e) {
    throw MultiplierError(std::string("multiplier: ") + e.what());
  }
  return Multiplier(p.topLeftCorner(n, n), p.topRightCorner(n, n),
                    p.bottomRightCorner(n, n));
}

int run_solve(const SolveOptions& opt) {
  const MatrixFile input = read_matrix_file(opt.input);
  const DensityOperator rho = to_density(input);

  DetectionSettings settings;
  settings.solver.gap_tol = opt.gap_tol;
  settings.detect_eps = opt.detect_eps;
  settings.seed = opt.seed;
  settings.samples = opt.samples;

  const auto start = std::chrono::steady_clock::now();
  Verdict verdict;
  if (opt.method == "theorem2") {
    verdict = detect_entanglement(rho, settings);
  } else if (opt.method == "sprocedure") {
    if (!rho.bipartite())
      throw DimensionError("solve: method sprocedure needs a bipartite state");
    const Multiplier p = load_multiplier(opt, rho.dims()[0], rho.dims()[1]);
    verdict = detect_with_sprocedure(rho, p, settings);
  } else {
    verdict = detect_multipartite(rho, settings);
  }

  // Independent validation of the returned witness: a local product-state
  // search should not find a markedly negative value on a sound witness.
  std::optional<Real> seesaw_value;
  if (verdict.witness)
    seesaw_value =
        seesaw_min_product(*verdict.witness, 8, 500, settings.seed).value;
  const Real wall_ms =
      std::chrono::duration<Real, std::milli>(std::chrono::steady_clock::now() -
                                              start)
          .count();

  if (!opt.output.empty()) {
    ReportFile report;
    report.method = verdict.method;
    report.verdict = verdict.kind;
    report.value = verdict.value;
    report.detect_eps = settings.detect_eps;
    if (verdict.certificates) {
      report.duality_gap = verdict.certificates->duality_gap;
      report.primal_residual = verdict.certificates->primal_residual;
      report.equality_residual = verdict.certificates->equality_residual;
      report.iterations = verdict.certificates->iterations;
      report.status = status_name(verdict.certificates->status);
    } else {
      report.status = "none";
    }
    if (verdict.witness)
      report.witness =
          from_hermitian(verdict.witness->op,
                         {verdict.witness->dA, verdict.witness->dB}, "witness");
    report.seesaw_value = seesaw_value;
    report.seed = settings.seed;
    report.wall_time_ms = wall_ms;
    save_report_file(opt.output, report);
  }

  std::cout << (verdict.kind == VerdictKind::Entangled ? "ENTANGLED"
                                                       : "INCONCLUSIVE")
            << " value=" << format_value(verdict.value) << "\n";
  return kExitOk;
}

int run_ppt(const std::string& input_path) {
  const MatrixFile input = read_matrix_file(input_path);
  const DensityOperator rho = to_density(input);
  const PptResult result = ppt_check(rho);
  if (result.is_ppt)
    std::cout << "PPT\n";
  else
    std::cout << "NPT min_eig=" << format_value(result.min_pt_eigenvalue)
              << "\n";
  return kExitOk;
}

int run_verify(const std::string& witness_path, const std::string& state_path,
               int samples, std::uint64_t seed) {
  const HermitianOperator w = to_hermitian(read_matrix_file(witness_path));
  const DensityOperator rho = to_density(read_matrix_file(state_path));
  if (!rho.bipartite())
    throw DimensionError("verify: state must be bipartite");
  if (w.dim() != rho.dim())
    throw DimensionError(
        "verify: witness and state dimensions must agree");
  const Index dA = rho.dims()[0], dB = rho.dims()[1];

  const Real trace = w.matrix().trace().real();
  const Real min_eig = eigenvalues(w).minCoeff();
  const Real objective = trace_product(w, rho.op());
  const SeesawResult seesaw =
      seesaw_min_product(w, dA, dB, samples, 500, seed);

  std::cout << "trace=" << format_value(trace) << "\n";
  std::cout << "min_eigenvalue=" << format_value(min_eig) << "\n";
  std::cout << "objective=" << format_value(objective) << "\n";
  std::cout << "seesaw_min=" << format_value(seesaw.value) << "\n";

  // The conditions for a bona fide entanglement witness: normalized trace
  // (file tolerance absorbs printed rounding), a negative eigenvalue, and
  // no product state found below the numerical floor.
  const bool trace_ok = std::abs(trace - 1.0) <= 1e-3;
  const bool eig_ok = min_eig < 0;
  const bool seesaw_ok = seesaw.value >= -1e-7;
  if (!trace_ok)
    std::cout << "FAIL trace must equal 1 within 1e-3\n";
  else if (!eig_ok)
    std::cout << "FAIL witness has no negative eigenvalue\n";
  else if (!seesaw_ok)
    std::cout << "FAIL product-state search found value below -1e-7\n";
  else
    std::cout << "PASS\n";
  return (trace_ok && eig_ok && seesaw_ok) ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement detection via witness-search relaxations"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "Decide entangled vs inconclusive for a state file");
  solve_cmd->add_option("--input", solve_opt.input, "State matrix file")
      ->required();
  solve_cmd->add_option("--output", solve_opt.output,
                        "Write the full report here");
  solve_cmd
      ->add_option("--method", solve_opt.method,
                   "Detection method (theorem2, sprocedure, cuts)")
      ->check(CLI::IsMember({"theorem2", "sprocedure", "cuts"}));
  solve_cmd->add_option("--tol", solve_opt.gap_tol, "Solver duality-gap tolerance");
  solve_cmd->add_option("--detect-eps", solve_opt.detect_eps,
                        "Verdict threshold: Entangled when value < -eps");
  solve_cmd->add_option("--seed", solve_opt.seed, "Root seed for sampling");
  solve_cmd->add_option("--samples", solve_opt.samples,
                        "Sample count for multiplier validation");
  solve_cmd->add_option("--multiplier", solve_opt.multiplier_path,
                        "Multiplier matrix file (sprocedure only)");

  std::string ppt_input;
  CLI::App* ppt_cmd =
      app.add_subcommand("ppt", "Partial-transpose criterion for a state file");
  ppt_cmd->add_option("--input", ppt_input, "State matrix file")->required();

  std::string verify_witness, verify_state;
  int verify_samples = 200;
  std::uint64_t verify_seed = 0;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Check a witness file against the entanglement-witness "
                "conditions for a state");
  verify_cmd->add_option("witness", verify_witness, "Witness matrix file")
      ->required();
  verify_cmd->add_option("state", verify_state, "State matrix file")
      ->required();
  verify_cmd->add_option("--samples", verify_samples,
                         "Product-state search restarts");
  verify_cmd->add_option("--seed", verify_seed, "Root seed for the search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(solve_opt);
    if (ppt_cmd->parsed()) return run_ppt(ppt_input);
    return run_verify(verify_witness, verify_state, verify_samples,
                      verify_seed);
  } catch (const MultiplierError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadMultiplier;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const IllPosedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}
