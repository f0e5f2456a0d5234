#pragma once

#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace entwit {

using Real = double;
using Complex = std::complex<Real>;

/// Dense column-major complex matrix; the substrate for every state,
/// witness and LMI data block in this library.
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Fixed numeric tolerances shared across the library.  Every tolerance that
/// participates in a contract (type invariant, verdict threshold, certificate
/// bound) lives here so tests and production code agree by construction.
namespace tol {
inline constexpr Real hermiticity = 1e-12;     ///< max |H - H^dagger| entry
inline constexpr Real density_trace = 1e-9;    ///< |tr(rho) - 1|
inline constexpr Real density_eig = 1e-9;      ///< min eigenvalue of rho
inline constexpr Real witness_trace = 1e-9;    ///< |tr(W) - 1|
inline constexpr Real unit_norm = 1e-12;       ///< product-state factor norms
inline constexpr Real detect_eps = 1e-6;       ///< entanglement verdict margin
inline constexpr Real ppt_eig = 1e-9;          ///< PPT classification margin
inline constexpr Real seesaw_converge = 1e-12; ///< see-saw sweep stagnation
inline constexpr Real lfr_condition = 1e12;    ///< ill-posedness threshold
inline constexpr Real multiplier_check = 1e-9; ///< multiplier validity margin
}  // namespace tol

/// Thrown when matrix or vector shapes cannot be combined.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a value violates a documented type invariant; the message
/// names the invariant so callers can surface it verbatim.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a linear-fractional evaluation point is (numerically)
/// singular: ||(I - D Delta)^{-1}|| exceeds tol::lfr_condition.
class IllPosedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a detection routine cannot produce a verdict because the
/// underlying conic solve failed; distinct from an Inconclusive verdict.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a multiplier matrix fails its validity condition.
class MultiplierError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Returns true when every entry of m is finite (no NaN or infinity).
inline bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

/// Largest entrywise deviation from Hermitian symmetry, max |H - H^dagger|.
inline Real hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<Real>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Projects m onto the Hermitian matrices, (M + M^dagger) / 2.  Applied only
/// at construction boundaries that ingest external data.
inline ComplexMatrix symmetrize(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw DimensionError("symmetrize: matrix must be square");
  return ((m + m.adjoint()) / Complex(2, 0)).eval();
}

/// A square complex matrix certified Hermitian at construction
/// (max |H - H^dagger| entry within tol::hermiticity) with finite entries.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols())
      throw InvariantError("hermitian operator: matrix must be square");
    if (!all_finite(matrix_))
      throw InvariantError("hermitian operator: entries must be finite");
    if (hermiticity_defect(matrix_) > tol::hermiticity)
      throw InvariantError(
          "hermitian operator: matrix deviates from H = H^dagger by more "
          "than 1e-12");
  }

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

/// A trace-one positive-semidefinite Hermitian operator together with the
/// list of subsystem dimensions whose product equals its dimension.
class DensityOperator {
 public:
  DensityOperator(std::vector<Index> dims, HermitianOperator op)
      : dims_(std::move(dims)), op_(std::move(op)) {
    if (dims_.empty())
      throw InvariantError("density operator: needs at least one subsystem");
    Index prod = 1;
    for (Index d : dims_) {
      if (d < 2)
        throw InvariantError(
            "density operator: every subsystem dimension must be >= 2");
      prod *= d;
    }
    if (prod != op_.dim())
      throw InvariantError(
          "density operator: product of subsystem dimensions must equal the "
          "operator dimension");
    const Real trace = op_.matrix().trace().real();
    if (std::abs(trace - 1.0) > tol::density_trace)
      throw InvariantError(
          "density operator: trace must equal 1 within 1e-9, got " +
          std::to_string(trace));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op_.matrix(),
                                                    Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::density_eig)
      throw InvariantError(
          "density operator: minimum eigenvalue must be >= -1e-9, got " +
          std::to_string(es.eigenvalues().minCoeff()));
  }

  const std::vector<Index>& dims() const { return dims_; }
  const HermitianOperator& op() const { return op_; }
  const ComplexMatrix& matrix() const { return op_.matrix(); }
  Index dim() const { return op_.dim(); }
  bool bipartite() const { return dims_.size() == 2; }

 private:
  std::vector<Index> dims_;
  HermitianOperator op_;
};

}  // namespace entwit
