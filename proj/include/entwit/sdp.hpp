#pragma once

#include <utility>
#include <vector>

#include "entwit/types.hpp"

namespace entwit {

/// One LMI block of an inequality-form conic program.  The block contributes
/// the constraint  F0 + sum_i x_i F_i >= 0 (positive semidefinite).
/// Coefficient matrices are stored sparsely by variable index: a variable
/// absent from `terms` has a zero coefficient on this block.  All matrices
/// in a block are Hermitian and share the block dimension.
struct LMIBlock {
  ComplexMatrix f0;
  std::vector<std::pair<int, ComplexMatrix>> terms;

  Index dim() const { return f0.rows(); }
};

/// minimize c.x  subject to  F0_b + sum_i x_i F_i_b >= 0 for every block b
/// and a_e.x = b_e for every equality e.
struct SDPProblem {
  RealVector c;
  std::vector<LMIBlock> blocks;
  std::vector<std::pair<RealVector, Real>> equalities;

  int num_vars() const { return static_cast<int>(c.size()); }

  /// Throws InvariantError / DimensionError when shapes disagree, a
  /// coefficient matrix is not Hermitian, or an index is out of range.
  void validate() const;
};

enum class SolverStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

/// Per-iteration progress snapshot; the sequence doubles as a determinism
/// witness (identical inputs must reproduce it exactly).
struct IterationRecord {
  Real mu;             ///< complementarity measure tr(SZ)/n
  Real gap;            ///< duality gap tr(SZ)
  Real primal_infeas;  ///< max block norm of F(x) - S
  Real dual_infeas;    ///< max |c_i - tr(Z F_i)|
  Real step_primal;
  Real step_dual;
};

struct SDPSolution {
  SolverStatus status = SolverStatus::NumericalFailure;
  RealVector x;
  Real objective = 0;
  Real duality_gap = 0;
  /// Most negative eigenvalue over the blocks of F(x); >= 0 means feasible.
  Real primal_residual = 0;
  /// Largest |a.x - b| over the equalities.
  Real equality_residual = 0;
  int iterations = 0;
  std::vector<IterationRecord> trace;
};

struct SolverSettings {
  Real gap_tol = 1e-8;
  Real feas_tol = 1e-8;
  int max_iterations = 200;
  /// Scales the identity used as the strictly interior starting point.
  Real initial_centering = 1.0;
  /// Fraction of the step to the cone boundary actually taken.
  Real step_fraction = 0.98;
};

/// Solves the program by a primal-dual path-following interior-point method
/// (infeasible start, predictor-corrector).  Hermitian blocks with complex
/// entries are handled through the real symmetric embedding
/// [[Re H, -Im H], [Im H, Re H]]; equalities are eliminated onto an affine
/// subspace before the interior-point loop.  Deterministic: no randomized
/// pivoting, identical inputs yield identical iterate sequences.
SDPSolution solve(const SDPProblem& p, const SolverSettings& s = {});

/// Certificates for an arbitrary candidate point, computed directly from the
/// problem data and independent of any solver internals.
struct SolutionCertificate {
  std::vector<Real> block_min_eigenvalues;
  std::vector<Real> equality_residuals;
  Real objective = 0;
  Real primal_residual = 0;   ///< min over block_min_eigenvalues
  Real equality_residual = 0; ///< max |a.x - b|
};

SolutionCertificate check_solution(const SDPProblem& p, const RealVector& x);

// ---------------------------------------------------------------------------
// Hermitian matrix variables.
//
// A d x d Hermitian matrix variable is compiled to d^2 real coordinates: the
// d diagonal entries first, then for each p < q (lexicographic) the real and
// imaginary parts of the (p, q) entry.  The basis elements are E_pp,
// E_pq + E_qp and i(E_pq - E_qp), so coordinates are exactly those parts.
// ---------------------------------------------------------------------------

/// Number of real coordinates of a d x d Hermitian variable (= d^2).
inline int hermitian_coord_count(Index d) { return static_cast<int>(d * d); }

/// The alpha-th Hermitian basis matrix in the coordinate order above.
ComplexMatrix hermitian_basis_element(Index d, int alpha);

/// Reconstructs W = sum_alpha x_alpha H_alpha from coordinates.
ComplexMatrix hermitian_from_coords(const RealVector& x, Index d);

/// Inverse of hermitian_from_coords (exact for Hermitian input).
RealVector coords_from_hermitian(const ComplexMatrix& w);

/// Pairing vector v with v.x = Re tr(W M) for W = sum_alpha x_alpha H_alpha;
/// used to compile objectives tr(W rho) and trace equalities.
RealVector hermitian_pairing_vector(const ComplexMatrix& m);

}  // namespace entwit
