#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entwit/sdp.hpp"
#include "entwit/types.hpp"
#include "entwit/witness.hpp"

namespace entwit {

/// On-disk matrix document: subsystem dimension list plus a row-major nested
/// array of [re, im] pairs.  The JSON grammar is strict — every complex
/// entry must be a two-element array of numbers, the matrix must be
/// (prod dims) x (prod dims), and no string encodings are accepted.
struct MatrixFile {
  std::vector<Index> dims;
  ComplexMatrix matrix;
  std::string name;  ///< optional; empty when absent
};

/// Parses a MatrixFile from JSON text.  Throws InvariantError (malformed
/// document, non-finite or non-numeric entries) or DimensionError (shape
/// inconsistent with dims) with a message naming the violated invariant.
MatrixFile parse_matrix_file(const std::string& text);

/// Serializes with every number printed at 17 significant digits, enough
/// for the binary value to survive a write/parse round trip bit for bit.
std::string write_matrix_file(const MatrixFile& file);

MatrixFile read_matrix_file(const std::string& path);
void save_matrix_file(const std::string& path, const MatrixFile& file);

/// Checks the parsed matrix against the HermitianOperator contract at the
/// file tolerance (1e-9, looser than the in-memory 1e-12 because decimal
/// files may carry rounded entries), then symmetrizes.
HermitianOperator to_hermitian(const MatrixFile& file);

/// to_hermitian plus the DensityOperator invariants (subsystem dimensions,
/// unit trace, positive semidefiniteness).
DensityOperator to_density(const MatrixFile& file);

MatrixFile from_hermitian(const HermitianOperator& op,
                          const std::vector<Index>& dims,
                          const std::string& name = "");

/// Structured result document written by the solve command: the verdict and
/// optimum, the solver's certificates, the witness matrix, the see-saw
/// validation value, and the run's seed and wall time.
struct ReportFile {
  std::string method;
  VerdictKind verdict = VerdictKind::Inconclusive;
  Real value = 0;
  Real detect_eps = tol::detect_eps;
  Real duality_gap = 0;
  Real primal_residual = 0;
  Real equality_residual = 0;
  int iterations = 0;
  std::string status;
  std::optional<MatrixFile> witness;
  std::optional<Real> seesaw_value;
  std::uint64_t seed = 0;
  Real wall_time_ms = 0;
};

/// Serializes a report (same 17-significant-digit number encoding).
/// Throws InvariantError when the verdict kind disagrees with
/// value < -detect_eps.
std::string write_report_file(const ReportFile& report);

/// Parses a report document; used for round-trip and determinism checks.
ReportFile parse_report_file(const std::string& text);

void save_report_file(const std::string& path, const ReportFile& report);
ReportFile read_report_file(const std::string& path);

}  // namespace entwit
