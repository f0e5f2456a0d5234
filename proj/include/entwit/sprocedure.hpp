#pragma once

#include <cstdint>

#include "entwit/lfr.hpp"
#include "entwit/sdp.hpp"
#include "entwit/types.hpp"
#include "entwit/witness.hpp"

namespace entwit {

/// Multiplier P = [[Q, S], [S^dagger, R]] certifying a structured robust
/// constraint: validity means [Delta; I]^dagger P [Delta; I] >= 0 for every
/// admissible Delta.  Q and R are Hermitian N x N, S is N x N.
struct Multiplier {
  Multiplier(ComplexMatrix q_, ComplexMatrix s_, ComplexMatrix r_);

  Index size() const { return q.rows(); }

  /// Assembles the full 2N x 2N block matrix P.
  ComplexMatrix assemble() const;

  ComplexMatrix q, s, r;
};

/// The fixed multiplier diag(-I_N, I_N); for it
/// [Delta; I]^dagger P [Delta; I] = I - Delta^dagger Delta, which is PSD
/// whenever every diagonal entry of Delta has modulus <= 1 — in particular
/// for Delta built from unit-norm coefficient vectors.
Multiplier simple_multiplier(Index n);

/// Size N of the parameter block of the witness realization on dA (x) dB —
/// the multiplier for a state of those dimensions must be 2N x 2N.
Index multiplier_block_size(Index dA, Index dB);

struct MultiplierCheck {
  bool ok = false;
  Real worst = 0;  ///< most negative eigenvalue found over the samples
};

/// Samples unit-norm coefficient vectors, builds Delta for each and checks
/// [Delta; I]^dagger P [Delta; I] >= 0; ok when the most negative sampled
/// eigenvalue stays >= -tol::multiplier_check.
MultiplierCheck check_multiplier(const Multiplier& p,
                                 const DeltaStructure& structure, int samples,
                                 std::uint64_t seed);

/// Compiles the robust witness constraint into one LMI over W using the
/// multiplier relaxation with the scaling matrix fixed to -identity: with
/// the witness realization (A = 0, B linear in W, fixed C and D), the
/// quadratic-form condition
///
///   [[I, 0], [0, B], [0, I], [C, D]]^dagger Diag([[0, -I], [-I, 0]], P)
///   [[I, 0], [0, B], [0, I], [C, D]]  <=  0
///
/// becomes the block LMI -G(W) >= 0 with
///   G = [[C^dagger R C,  C^dagger S^dagger + C^dagger R D - B(W)],
///        [(...)^dagger,  Q + S D + D^dagger S^dagger + D^dagger R D]].
/// The program minimizes tr(W rho) under tr W = 1 and that LMI; every
/// feasible W is non-negative on product states for any valid multiplier.
SDPProblem build_sprocedure_sdp(const DensityOperator& rho,
                                const Multiplier& p);

/// Runs the multiplier relaxation end to end.  The multiplier is validated
/// first (MultiplierError on failure).  When the compiled program is
/// infeasible — which happens for the simple multiplier, whose R forces a
/// negative-definite constant block — the verdict is Inconclusive with
/// method "sprocedure-infeasible" and value 0 standing in for the missing
/// optimum.  Solver breakdowns are thrown as SolverError.
Verdict detect_with_sprocedure(const DensityOperator& rho, const Multiplier& p,
                               const DetectionSettings& settings = {});

}  // namespace entwit
