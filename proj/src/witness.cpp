#include "entwit/witness.hpp"

#include <cmath>
#include <limits>

#include "entwit/linalg.hpp"
#include "entwit/rng.hpp"

namespace entwit {

namespace {

constexpr Real kSqrt2Half = 0.70710678118654752440;

void require_bipartite(const DensityOperator& rho, const char* who) {
  if (!rho.bipartite())
    throw DimensionError(std::string(who) + ": state must be bipartite");
}

/// The four per-pair combination matrices for fixed blocks of a Hermitian
/// matrix: diag/(dA-1) + s * (sqrt2/2) * (real or imaginary part carrier).
ComplexMatrix pair_combination(const ComplexMatrix& diag,
                               const ComplexMatrix& kj,
                               const ComplexMatrix& jk, Index dA, int family,
                               Real sign) {
  const Complex i(0, 1);
  ComplexMatrix comb = family == 0 ? ComplexMatrix(kj + jk)
                                   : ComplexMatrix(-i * (kj - jk));
  return diag / Real(dA - 1) + sign * kSqrt2Half * comb;
}

}  // namespace

SDPProblem build_theorem2(const DensityOperator& rho) {
  require_bipartite(rho, "build_theorem2");
  const Index dA = rho.dims()[0], dB = rho.dims()[1];
  const Index d = dA * dB;
  const int m = hermitian_coord_count(d);

  SDPProblem p;
  p.c = hermitian_pairing_vector(rho.matrix());
  p.equalities.emplace_back(hermitian_pairing_vector(identity(d)), 1.0);

  // Precompute the subsystem blocks of every Hermitian basis element; each
  // element has at most two nonzero entries, so most blocks are zero.
  std::vector<ComplexMatrix> basis(m);
  for (int alpha = 0; alpha < m; ++alpha)
    basis[alpha] = hermitian_basis_element(d, alpha);
  const auto sub = [&](int alpha, Index i, Index j) {
    return basis[alpha].block(i * dB, j * dB, dB, dB);
  };

  for (Index k = 0; k < dA; ++k) {
    LMIBlock blk;
    blk.f0 = ComplexMatrix::Zero(dB, dB);
    for (int alpha = 0; alpha < m; ++alpha) {
      ComplexMatrix t = sub(alpha, k, k);
      if (t.cwiseAbs().maxCoeff() > 0) blk.terms.emplace_back(alpha, t);
    }
    p.blocks.push_back(std::move(blk));
  }

  for (Index k = 0; k < dA; ++k)
    for (Index j = 0; j < dA; ++j) {
      if (j == k) continue;
      for (int family = 0; family < 2; ++family)
        for (const Real sign : {1.0, -1.0}) {
          LMIBlock blk;
          blk.f0 = ComplexMatrix::Zero(dB, dB);
          for (int alpha = 0; alpha < m; ++alpha) {
            ComplexMatrix t = pair_combination(sub(alpha, k, k),
                                               sub(alpha, k, j),
                                               sub(alpha, j, k), dA, family,
                                               sign);
            if (t.cwiseAbs().maxCoeff() > 0) blk.terms.emplace_back(alpha, t);
          }
          p.blocks.push_back(std::move(blk));
        }
    }
  return p;
}

std::vector<ComplexMatrix> theorem2_constraint_blocks(
    const HermitianOperator& w, Index dA, Index dB) {
  if (w.dim() != dA * dB)
    throw DimensionError(
        "theorem2_constraint_blocks: operator dimension must equal dA*dB");
  std::vector<ComplexMatrix> out;
  for (Index k = 0; k < dA; ++k) out.push_back(block(w, k, k, dA, dB));
  for (Index k = 0; k < dA; ++k)
    for (Index j = 0; j < dA; ++j) {
      if (j == k) continue;
      const ComplexMatrix kk = block(w, k, k, dA, dB);
      const ComplexMatrix kj = block(w, k, j, dA, dB);
      const ComplexMatrix jk = block(w, j, k, dA, dB);
      for (int family = 0; family < 2; ++family)
        for (const Real sign : {1.0, -1.0})
          out.push_back(pair_combination(kk, kj, jk, dA, family, sign));
    }
  return out;
}

Verdict detect_entanglement(const DensityOperator& rho,
                            const DetectionSettings& settings) {
  require_bipartite(rho, "detect_entanglement");
  const Index dA = rho.dims()[0], dB = rho.dims()[1];

  const SDPProblem problem = build_theorem2(rho);
  const SDPSolution solution = solve(problem, settings.solver);
  if (solution.status != SolverStatus::Optimal)
    throw SolverError(
        "detect_entanglement: relaxation solve did not reach optimality "
        "(status " +
        std::to_string(static_cast<int>(solution.status)) + ")");

  HermitianOperator w(symmetrize(hermitian_from_coords(solution.x, dA * dB)));
  const Real value = trace_product(w, rho.op());

  Verdict verdict;
  verdict.value = value;
  verdict.method = "theorem2";
  verdict.kind = value < -settings.detect_eps ? VerdictKind::Entangled
                                              : VerdictKind::Inconclusive;
  verdict.witness = Witness(std::move(w), dA, dB, value);
  verdict.certificates =
      SolveCertificates{solution.duality_gap, solution.primal_residual,
                        solution.equality_residual, solution.iterations,
                        solution.status};
  return verdict;
}

ComplexMatrix evaluate_robust_constraint(const HermitianOperator& w,
                                         const ComplexVector& a, Index dA,
                                         Index dB) {
  if (w.dim() != dA * dB)
    throw DimensionError(
        "evaluate_robust_constraint: operator dimension must equal dA*dB");
  if (a.size() != dA)
    throw DimensionError(
        "evaluate_robust_constraint: coefficient vector length must equal dA");
  if (!a.allFinite())
    throw InvariantError(
        "evaluate_robust_constraint: coefficients must be finite");
  ComplexMatrix out = ComplexMatrix::Zero(dB, dB);
  for (Index i = 0; i < dA; ++i)
    for (Index j = 0; j < dA; ++j)
      out += std::conj(a(i)) * a(j) * w.matrix().block(i * dB, j * dB, dB, dB);
  return out;
}

ComplexMatrix evaluate_robust_constraint(const Witness& w,
                                         const ComplexVector& a) {
  return evaluate_robust_constraint(w.op, a, w.dA, w.dB);
}

SeesawResult seesaw_min_product(const HermitianOperator& w, Index dA, Index dB,
                                int restarts, int iters, std::uint64_t seed) {
  if (w.dim() != dA * dB)
    throw DimensionError(
        "seesaw_min_product: operator dimension must equal dA*dB");
  if (restarts < 1 || iters < 1)
    throw InvariantError("seesaw_min_product: restarts and iters must be >= 1");

  Real best = std::numeric_limits<Real>::infinity();
  ComplexVector best_a, best_b;

  for (int r = 0; r < restarts; ++r) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(r));
    ComplexVector a = rng.unit_vector(dA);
    ComplexVector b = rng.unit_vector(dB);
    Real value = std::numeric_limits<Real>::infinity();
    Real prev = value;
    for (int it = 0; it < iters; ++it) {
      // Fix |phi> = b, minimize over |psi>: smallest eigenvector of the
      // dA x dA matrix with entries <b| W_ij |b>.
      ComplexMatrix ma(dA, dA);
      for (Index i = 0; i < dA; ++i)
        for (Index j = 0; j < dA; ++j)
          ma(i, j) =
              (b.adjoint() * w.matrix().block(i * dB, j * dB, dB, dB) * b)(0);
      ma = symmetrize(ma);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> ea(ma);
      a = ea.eigenvectors().col(0);

      // Fix |psi> = a, minimize over |phi>.
      ComplexMatrix mb = symmetrize(evaluate_robust_constraint(w, a, dA, dB));
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eb(mb);
      b = eb.eigenvectors().col(0);
      value = eb.eigenvalues()(0);
      if (std::abs(value - prev) < tol::seesaw_converge) break;
      prev = value;
    }
    if (value < best) {
      best = value;
      best_a = a;
      best_b = b;
    }
  }
  return SeesawResult{best, ProductState({best_a / best_a.norm(),
                                          best_b / best_b.norm()})};
}

SeesawResult seesaw_min_product(const Witness& w, int restarts, int iters,
                                std::uint64_t seed) {
  return seesaw_min_product(w.op, w.dA, w.dB, restarts, iters, seed);
}

PptResult ppt_check(const DensityOperator& rho) {
  require_bipartite(rho, "ppt_check");
  const RealVector eigs = eigenvalues(partial_transpose(rho, 1));
  const Real lmin = eigs.minCoeff();
  return PptResult{lmin >= -tol::ppt_eig, lmin};
}

DensityOperator sample_separable(const std::vector<Index>& dims,
                                 int mixture_size, std::uint64_t seed) {
  if (mixture_size < 1)
    throw InvariantError("sample_separable: mixture_size must be >= 1");
  Rng rng(seed);
  Index d = 1;
  for (Index dk : dims) d *= dk;
  const RealVector weights = rng.dirichlet_uniform(mixture_size);
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (int t = 0; t < mixture_size; ++t) {
    ComplexVector prod = ComplexVector::Ones(1);
    for (Index dk : dims)
      prod = kron(prod, rng.unit_vector(dk)).eval();
    acc += weights(t) * (prod * prod.adjoint());
  }
  acc = symmetrize(acc);
  acc /= acc.trace().real();
  return DensityOperator(dims, HermitianOperator(acc));
}

}  // namespace entwit
