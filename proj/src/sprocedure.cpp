#include "entwit/sprocedure.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "entwit/linalg.hpp"
#include "entwit/rng.hpp"

namespace entwit {

Multiplier::Multiplier(ComplexMatrix q_, ComplexMatrix s_, ComplexMatrix r_)
    : q(std::move(q_)), s(std::move(s_)), r(std::move(r_)) {
  const Index n = q.rows();
  if (q.cols() != n || s.rows() != n || s.cols() != n || r.rows() != n ||
      r.cols() != n)
    throw DimensionError("multiplier: Q, S, R must be square of equal size");
  if (hermiticity_defect(q) > tol::hermiticity ||
      hermiticity_defect(r) > tol::hermiticity)
    throw InvariantError("multiplier: Q and R must be Hermitian");
  if (!all_finite(q) || !all_finite(s) || !all_finite(r))
    throw InvariantError("multiplier: entries must be finite");
}

ComplexMatrix Multiplier::assemble() const {
  const Index n = size();
  ComplexMatrix p(2 * n, 2 * n);
  p.topLeftCorner(n, n) = q;
  p.topRightCorner(n, n) = s;
  p.bottomLeftCorner(n, n) = s.adjoint();
  p.bottomRightCorner(n, n) = r;
  return p;
}

Multiplier simple_multiplier(Index n) {
  if (n < 1) throw DimensionError("simple_multiplier: size must be >= 1");
  return Multiplier(-ComplexMatrix::Identity(n, n),
                    ComplexMatrix::Zero(n, n),
                    ComplexMatrix::Identity(n, n));
}

Index multiplier_block_size(Index dA, Index dB) {
  if (dA < 2 || dB < 2)
    throw DimensionError(
        "multiplier_block_size: subsystem dimensions must be >= 2");
  return witness_lfr(HermitianOperator(ComplexMatrix::Zero(dA * dB, dA * dB)),
                     dA, dB)
      .structure.size();
}

MultiplierCheck check_multiplier(const Multiplier& p,
                                 const DeltaStructure& structure, int samples,
                                 std::uint64_t seed) {
  if (p.size() != structure.size())
    throw DimensionError(
        "check_multiplier: multiplier size must equal the structure size");
  if (samples < 1)
    throw InvariantError("check_multiplier: samples must be >= 1");
  const int k = structure.num_params();
  Real worst = std::numeric_limits<Real>::infinity();
  for (int t = 0; t < samples; ++t) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(t));
    const ComplexMatrix delta = build_delta(structure, rng.unit_vector(k));
    const ComplexMatrix form = delta.adjoint() * p.q * delta +
                               delta.adjoint() * p.s +
                               p.s.adjoint() * delta + p.r;
    worst = std::min(worst, min_eigenvalue(form));
  }
  return MultiplierCheck{worst >= -tol::multiplier_check, worst};
}

SDPProblem build_sprocedure_sdp(const DensityOperator& rho,
                                const Multiplier& p) {
  if (!rho.bipartite())
    throw DimensionError("build_sprocedure_sdp: state must be bipartite");
  const Index dA = rho.dims()[0], dB = rho.dims()[1];
  const Index d = dA * dB;

  // The realization's C, D and parameter structure are independent of W;
  // take them from the zero operator.
  const LFR shape = witness_lfr(
      HermitianOperator(ComplexMatrix::Zero(d, d)), dA, dB);
  const Index n = shape.structure.size();
  if (p.size() != n)
    throw DimensionError(
        "build_sprocedure_sdp: multiplier size must equal the realization's "
        "parameter block size");

  const ComplexMatrix& c = shape.c;
  const ComplexMatrix& dd = shape.d;

  // Constant part of G (everything except the -B(W) coupling).
  const Index ldim = dB + n;
  ComplexMatrix g0 = ComplexMatrix::Zero(ldim, ldim);
  g0.topLeftCorner(dB, dB) = c.adjoint() * p.r * c;
  const ComplexMatrix off = c.adjoint() * p.s.adjoint() + c.adjoint() * p.r * dd;
  g0.topRightCorner(dB, n) = off;
  g0.bottomLeftCorner(n, dB) = off.adjoint();
  g0.bottomRightCorner(n, n) = p.q + p.s * dd + dd.adjoint() * p.s.adjoint() +
                               dd.adjoint() * p.r * dd;

  SDPProblem out;
  out.c = hermitian_pairing_vector(rho.matrix());
  out.equalities.emplace_back(hermitian_pairing_vector(identity(d)), 1.0);

  LMIBlock blk;
  blk.f0 = symmetrize(-g0);
  const int m = hermitian_coord_count(d);
  for (int alpha = 0; alpha < m; ++alpha) {
    const LFR basis_lfr = witness_lfr(
        HermitianOperator(hermitian_basis_element(d, alpha)), dA, dB);
    ComplexMatrix t = ComplexMatrix::Zero(ldim, ldim);
    t.topRightCorner(dB, n) = basis_lfr.b;
    t.bottomLeftCorner(n, dB) = basis_lfr.b.adjoint();
    if (t.cwiseAbs().maxCoeff() > 0) blk.terms.emplace_back(alpha, t);
  }
  out.blocks.push_back(std::move(blk));
  return out;
}

Verdict detect_with_sprocedure(const DensityOperator& rho, const Multiplier& p,
                               const DetectionSettings& settings) {
  if (!rho.bipartite())
    throw DimensionError("detect_with_sprocedure: state must be bipartite");
  const Index dA = rho.dims()[0], dB = rho.dims()[1];
  const Index d = dA * dB;

  const LFR shape =
      witness_lfr(HermitianOperator(ComplexMatrix::Zero(d, d)), dA, dB);
  const MultiplierCheck check =
      check_multiplier(p, shape.structure, settings.samples, settings.seed);
  if (!check.ok)
    throw MultiplierError(
        "detect_with_sprocedure: multiplier fails its validity condition "
        "(most negative sampled eigenvalue " +
        std::to_string(check.worst) + ")");

  const SDPProblem problem = build_sprocedure_sdp(rho, p);
  const SDPSolution solution = solve(problem, settings.solver);

  if (solution.status == SolverStatus::Infeasible) {
    Verdict verdict;
    verdict.kind = VerdictKind::Inconclusive;
    verdict.value = 0;
    verdict.method = "sprocedure-infeasible";
    verdict.certificates =
        SolveCertificates{solution.duality_gap, solution.primal_residual,
                          solution.equality_residual, solution.iterations,
                          solution.status};
    return verdict;
  }
  if (solution.status != SolverStatus::Optimal)
    throw SolverError(
        "detect_with_sprocedure: relaxation solve did not reach optimality "
        "(status " +
        std::to_string(static_cast<int>(solution.status)) + ")");

  HermitianOperator w(symmetrize(hermitian_from_coords(solution.x, dA * dB)));
  const Real value = trace_product(w, rho.op());
  Verdict verdict;
  verdict.value = value;
  verdict.method = "sprocedure";
  verdict.kind = value < -settings.detect_eps ? VerdictKind::Entangled
                                              : VerdictKind::Inconclusive;
  verdict.witness = Witness(std::move(w), dA, dB, value);
  verdict.certificates =
      SolveCertificates{solution.duality_gap, solution.primal_residual,
                        solution.equality_residual, solution.iterations,
                        solution.status};
  return verdict;
}

}  // namespace entwit
