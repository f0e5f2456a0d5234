#include "entwit/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "entwit/linalg.hpp"

namespace entwit {

namespace {

constexpr Real kInfinity = std::numeric_limits<Real>::infinity();

/// tr(A B) for real square matrices.
Real trdot(const RealMatrix& a, const RealMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian
/// matrix; positive semidefiniteness is preserved and eigenvalues double in
/// multiplicity.
RealMatrix embed(const ComplexMatrix& h) {
  const Index d = h.rows();
  RealMatrix out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = h.real();
  out.bottomRightCorner(d, d) = h.real();
  out.topRightCorner(d, d) = -h.imag();
  out.bottomLeftCorner(d, d) = h.imag();
  return out;
}

/// Largest step alpha so that X + alpha dX stays positive definite, given
/// the Cholesky factor of X; +infinity when dX is not descent-limited.
Real step_to_boundary(const Eigen::LLT<RealMatrix>& llt, const RealMatrix& dx) {
  const auto& l = llt.matrixL();
  RealMatrix c = l.solve(dx);
  RealMatrix w = l.solve(c.transpose()).transpose();
  w = 0.5 * (w + w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(w, Eigen::EigenvaluesOnly);
  const Real lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return kInfinity;
  return -1.0 / lmin;
}

struct ReducedProblem {
  RealVector c;                                // reduced objective
  std::vector<std::vector<RealMatrix>> g;      // g[b][0] const, g[b][j+1] var j
  Index total_dim = 0;
};

}  // namespace

void SDPProblem::validate() const {
  const int m = num_vars();
  if (blocks.empty())
    throw InvariantError("sdp problem: needs at least one LMI block");
  for (const auto& blk : blocks) {
    const Index d = blk.f0.rows();
    if (blk.f0.cols() != d)
      throw InvariantError("sdp problem: block matrices must be square");
    if (hermiticity_defect(blk.f0) > tol::hermiticity)
      throw InvariantError("sdp problem: block constant must be Hermitian");
    for (const auto& [idx, f] : blk.terms) {
      if (idx < 0 || idx >= m)
        throw InvariantError("sdp problem: term variable index out of range");
      if (f.rows() != d || f.cols() != d)
        throw DimensionError(
            "sdp problem: term matrix dimension differs from its block");
      if (hermiticity_defect(f) > tol::hermiticity)
        throw InvariantError("sdp problem: term matrices must be Hermitian");
    }
  }
  for (const auto& [a, b] : equalities) {
    (void)b;
    if (a.size() != m)
      throw DimensionError(
          "sdp problem: equality vector length must equal num_vars");
  }
}

SolutionCertificate check_solution(const SDPProblem& p, const RealVector& x) {
  if (x.size() != p.num_vars())
    throw DimensionError("check_solution: x length must equal num_vars");
  SolutionCertificate cert;
  cert.objective = p.c.dot(x);
  cert.primal_residual = kInfinity;
  for (const auto& blk : p.blocks) {
    ComplexMatrix f = blk.f0;
    for (const auto& [idx, fi] : blk.terms) f += x(idx) * fi;
    const Real lmin = min_eigenvalue(f);
    cert.block_min_eigenvalues.push_back(lmin);
    cert.primal_residual = std::min(cert.primal_residual, lmin);
  }
  cert.equality_residual = 0;
  for (const auto& [a, b] : p.equalities) {
    const Real r = a.dot(x) - b;
    cert.equality_residuals.push_back(r);
    cert.equality_residual = std::max(cert.equality_residual, std::abs(r));
  }
  return cert;
}

namespace {

/// Fills a solution's certificate fields from the original problem data.
void certify(const SDPProblem& p, SDPSolution& sol) {
  const SolutionCertificate cert = check_solution(p, sol.x);
  sol.objective = cert.objective;
  sol.primal_residual = cert.primal_residual;
  sol.equality_residual = cert.equality_residual;
}

}  // namespace

SDPSolution solve(const SDPProblem& p, const SolverSettings& s) {
  p.validate();
  if (!(s.gap_tol > 0) || !(s.feas_tol > 0))
    throw InvariantError("solver settings: tolerances must be positive");

  const int m = p.num_vars();
  SDPSolution sol;

  // --- Equality elimination: x = x0 + N y with A x0 = b, A N = 0. ---------
  RealVector x0 = RealVector::Zero(m);
  RealMatrix nullbasis = RealMatrix::Identity(m, m);
  if (!p.equalities.empty()) {
    const int k = static_cast<int>(p.equalities.size());
    RealMatrix a(k, m);
    RealVector b(k);
    for (int e = 0; e < k; ++e) {
      a.row(e) = p.equalities[e].first.transpose();
      b(e) = p.equalities[e].second;
    }
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(a);
    x0 = cod.solve(b);
    const Real incons = (a * x0 - b).cwiseAbs().maxCoeff();
    if (incons > 1e-9 * std::max<Real>(1.0, b.cwiseAbs().maxCoeff())) {
      sol.status = SolverStatus::Infeasible;
      sol.x = x0;
      certify(p, sol);
      return sol;
    }
    Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
    const RealVector sv = svd.singularValues();
    int rank = 0;
    const Real rank_tol = 1e-12 * std::max<Real>(1.0, sv.size() ? sv(0) : 0.0);
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > rank_tol) ++rank;
    nullbasis = svd.matrixV().rightCols(m - rank);
  }
  const int mr = static_cast<int>(nullbasis.cols());

  if (mr == 0) {
    // The equalities pin a unique point; certify it directly.
    sol.x = x0;
    certify(p, sol);
    sol.status = sol.primal_residual >= -s.feas_tol ? SolverStatus::Optimal
                                                    : SolverStatus::Infeasible;
    return sol;
  }

  // --- Compile reduced, all-real block data. -------------------------------
  ReducedProblem rp;
  rp.c = nullbasis.transpose() * p.c;
  rp.g.resize(p.blocks.size());
  for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
    const LMIBlock& blk = p.blocks[bi];
    const Index d = blk.dim();
    std::vector<ComplexMatrix> comb(mr + 1,
                                    ComplexMatrix::Zero(d, d).eval());
    comb[0] = blk.f0;
    for (const auto& [idx, fi] : blk.terms) {
      comb[0] += x0(idx) * fi;
      for (int j = 0; j < mr; ++j) {
        const Real w = nullbasis(idx, j);
        if (w != 0.0) comb[j + 1] += w * fi;
      }
    }
    bool needs_embedding = false;
    for (const auto& c : comb)
      if (c.imag().cwiseAbs().maxCoeff() != 0.0) {
        needs_embedding = true;
        break;
      }
    rp.g[bi].reserve(mr + 1);
    for (const auto& c : comb)
      rp.g[bi].push_back(needs_embedding ? embed(c) : RealMatrix(c.real()));
    rp.total_dim += rp.g[bi][0].rows();
  }

  // --- Interior-point loop (HKM direction, Mehrotra predictor-corrector). --
  const std::size_t nb = p.blocks.size();
  const Index n_total = rp.total_dim;

  Real data_scale = std::max<Real>(1.0, rp.c.size() ? rp.c.cwiseAbs().maxCoeff()
                                                    : 0.0);
  for (const auto& gs : rp.g)
    for (const auto& g : gs) data_scale = std::max(data_scale, g.norm());
  const Real kappa = s.initial_centering * std::max<Real>(10.0, 2.0 * data_scale);

  // Residual tolerances are relative to the data scale: asking for 1e-8
  // absolute accuracy from a program whose coefficients are ~1e3 would demand
  // ~1e-11 relative precision, past what double factorizations deliver, and
  // the loop would grind a converged iterate until the Cholesky breaks down.
  Real pscale = 1.0;
  for (const auto& gs : rp.g)
    pscale = std::max(pscale, 1.0 + gs[0].cwiseAbs().maxCoeff());
  const Real dscale = 1.0 + (rp.c.size() ? rp.c.cwiseAbs().maxCoeff() : 0.0);

  RealVector y = RealVector::Zero(mr);
  std::vector<RealMatrix> S(nb), Z(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const Index d = rp.g[b][0].rows();
    S[b] = kappa * RealMatrix::Identity(d, d);
    Z[b] = kappa * RealMatrix::Identity(d, d);
  }

  Real best_pinf = kInfinity;
  Real last_pinf = kInfinity;
  Real mu0 = -1.0;
  int stall = 0;
  SolverStatus status = SolverStatus::MaxIterations;
  Real final_gap = kInfinity;

  std::vector<Eigen::LLT<RealMatrix>> llt_s(nb), llt_z(nb);
  std::vector<RealMatrix> sinv(nb), rpb(nb), yb(nb);
  std::vector<RealMatrix> ds(nb), dz(nb), ds_aff(nb), dz_aff(nb);

  int iter = 0;
  for (; iter < s.max_iterations; ++iter) {
    bool factor_ok = true;
    for (std::size_t b = 0; b < nb; ++b) {
      llt_s[b].compute(S[b]);
      llt_z[b].compute(Z[b]);
      if (llt_s[b].info() != Eigen::Success ||
          llt_z[b].info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      sinv[b] = llt_s[b].solve(RealMatrix::Identity(S[b].rows(), S[b].cols()));
    }
    if (!factor_ok) {
      status = SolverStatus::NumericalFailure;
      break;
    }

    // Residuals and complementarity.
    Real gap = 0, pinf = 0;
    RealVector rd = rp.c;
    for (std::size_t b = 0; b < nb; ++b) {
      rpb[b] = rp.g[b][0] - S[b];
      for (int j = 0; j < mr; ++j) {
        if (y(j) != 0.0) rpb[b] += y(j) * rp.g[b][j + 1];
        rd(j) -= trdot(Z[b], rp.g[b][j + 1]);
      }
      gap += trdot(S[b], Z[b]);
      pinf = std::max(pinf, rpb[b].norm());
    }
    const Real dinf = rd.size() ? rd.cwiseAbs().maxCoeff() : 0.0;
    const Real mu = gap / static_cast<Real>(n_total);

    // Overflowed iterates poison every later comparison (NaN makes all the
    // convergence tests false), so classify on the last finite residuals: an
    // infeasible program drives the multipliers along an improving ray until
    // they overflow while the equality residual stays bounded away from zero.
    if (!std::isfinite(mu) || !std::isfinite(pinf) || !std::isfinite(dinf)) {
      status = last_pinf > s.feas_tol * pscale ? SolverStatus::Infeasible
                                               : SolverStatus::NumericalFailure;
      break;
    }
    if (mu0 < 0) mu0 = std::max(mu, Real(1));
    last_pinf = pinf;
    final_gap = gap;

    sol.trace.push_back({mu, gap, pinf, dinf, 0.0, 0.0});

    const Real gscale = 1.0 + std::abs(rp.c.size() ? rp.c.dot(y) : 0.0);
    if (pinf <= 0.5 * s.feas_tol * pscale && dinf <= s.feas_tol * dscale &&
        gap <= s.gap_tol) {
      status = SolverStatus::Optimal;
      break;
    }
    if (pinf < 0.9 * best_pinf) {
      best_pinf = pinf;
      stall = 0;
    } else {
      ++stall;
    }
    // Complementarity exploding by many orders of magnitude while the
    // equality residual refuses to drop is the same ray seen early.
    if (pinf > s.feas_tol * pscale &&
        (stall >= 30 || mu < 1e-13 * gscale || mu > 1e8 * mu0)) {
      status = SolverStatus::Infeasible;
      break;
    }

    // Schur complement M_jk = tr(G_j Z G_k S^{-1}) and shared right-hand
    // side pieces h_j = tr(G_j S^{-1}), q_j = tr(G_j Z R_p S^{-1}).
    RealMatrix schur = RealMatrix::Zero(mr, mr);
    RealVector h = RealVector::Zero(mr), q = RealVector::Zero(mr);
    for (std::size_t b = 0; b < nb; ++b) {
      yb[b] = Z[b] * rpb[b] * sinv[b];
      for (int j = 0; j < mr; ++j) {
        const RealMatrix wj = Z[b] * rp.g[b][j + 1] * sinv[b];
        for (int k = 0; k <= j; ++k)
          schur(k, j) += trdot(rp.g[b][k + 1], wj);
        h(j) += trdot(rp.g[b][j + 1], sinv[b]);
        q(j) += trdot(rp.g[b][j + 1], yb[b]);
      }
    }
    schur = schur.selfadjointView<Eigen::Upper>();

    Eigen::LLT<RealMatrix> schur_llt(schur);
    if (schur_llt.info() != Eigen::Success) {
      const Real base = std::max<Real>(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      bool recovered = false;
      for (Real reg = 1e-14; reg <= 1e-6; reg *= 100.0) {
        schur_llt.compute(schur + reg * base *
                                      RealMatrix::Identity(mr, mr));
        if (schur_llt.info() == Eigen::Success) {
          recovered = true;
          break;
        }
      }
      if (!recovered) {
        status = SolverStatus::NumericalFailure;
        break;
      }
    }

    // Predictor (affine scaling direction).
    const RealVector dx_aff = schur_llt.solve(-rp.c - q);
    for (std::size_t b = 0; b < nb; ++b) {
      ds_aff[b] = rpb[b];
      for (int j = 0; j < mr; ++j)
        if (dx_aff(j) != 0.0) ds_aff[b] += dx_aff(j) * rp.g[b][j + 1];
      const RealMatrix raw = Z[b] * ds_aff[b] * sinv[b];
      dz_aff[b] = -Z[b] - 0.5 * (raw + raw.transpose());
    }
    Real ap = 1.0, ad = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      ap = std::min(ap, s.step_fraction * step_to_boundary(llt_s[b], ds_aff[b]));
      ad = std::min(ad, s.step_fraction * step_to_boundary(llt_z[b], dz_aff[b]));
    }

    Real mu_aff = 0;
    for (std::size_t b = 0; b < nb; ++b)
      mu_aff += trdot(S[b] + ap * ds_aff[b], Z[b] + ad * dz_aff[b]);
    mu_aff = std::max<Real>(0.0, mu_aff / static_cast<Real>(n_total));
    const Real sigma =
        std::clamp(std::pow(mu_aff / std::max(mu, 1e-300), 3.0), 0.0, 1.0);

    // Corrector with second-order term K = dZ_aff dS_aff.
    RealVector rhs = sigma * mu * h - rp.c - q;
    for (std::size_t b = 0; b < nb; ++b) {
      const RealMatrix ks = dz_aff[b] * ds_aff[b] * sinv[b];
      for (int j = 0; j < mr; ++j) rhs(j) -= trdot(rp.g[b][j + 1], ks);
    }
    const RealVector dx = schur_llt.solve(rhs);
    for (std::size_t b = 0; b < nb; ++b) {
      ds[b] = rpb[b];
      for (int j = 0; j < mr; ++j)
        if (dx(j) != 0.0) ds[b] += dx(j) * rp.g[b][j + 1];
      const RealMatrix raw = (sigma * mu) * sinv[b] - Z[b] -
                             dz_aff[b] * ds_aff[b] * sinv[b] -
                             Z[b] * ds[b] * sinv[b];
      dz[b] = 0.5 * (raw + raw.transpose());
    }

    ap = 1.0;
    ad = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      ap = std::min(ap, s.step_fraction * step_to_boundary(llt_s[b], ds[b]));
      ad = std::min(ad, s.step_fraction * step_to_boundary(llt_z[b], dz[b]));
    }
    if (!std::isfinite(ap) || !std::isfinite(ad) || ap <= 0 || ad <= 0) {
      status = SolverStatus::NumericalFailure;
      break;
    }

    y += ap * dx;
    for (std::size_t b = 0; b < nb; ++b) {
      S[b] += ap * ds[b];
      S[b] = (0.5 * (S[b] + S[b].transpose())).eval();
      Z[b] += ad * dz[b];
      Z[b] = (0.5 * (Z[b] + Z[b].transpose())).eval();
    }
    sol.trace.back().step_primal = ap;
    sol.trace.back().step_dual = ad;
  }

  sol.status = status;
  sol.iterations = iter;
  sol.x = x0 + nullbasis * y;
  sol.duality_gap = final_gap;
  certify(p, sol);
  return sol;
}

// ---------------------------------------------------------------------------
// Hermitian variable coordinates.
// ---------------------------------------------------------------------------

namespace {

/// Maps a strict upper-triangle position (p, q), p < q, to its pair slot.
int pair_slot(Index d, Index p, Index q) {
  // Pairs are ordered lexicographically: (0,1), (0,2), ..., (0,d-1), (1,2), ...
  const Index before = p * d - p * (p + 1) / 2;  // pairs with first index < p
  return static_cast<int>(before + (q - p - 1));
}

}  // namespace

ComplexMatrix hermitian_basis_element(Index d, int alpha) {
  if (alpha < 0 || alpha >= hermitian_coord_count(d))
    throw DimensionError("hermitian basis: coordinate index out of range");
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  if (alpha < d) {
    h(alpha, alpha) = Complex(1, 0);
    return h;
  }
  int slot = (alpha - static_cast<int>(d)) / 2;
  const bool imaginary_part = ((alpha - static_cast<int>(d)) % 2) == 1;
  for (Index p = 0; p < d; ++p)
    for (Index q = p + 1; q < d; ++q) {
      if (pair_slot(d, p, q) == slot) {
        if (imaginary_part) {
          h(p, q) = Complex(0, 1);
          h(q, p) = Complex(0, -1);
        } else {
          h(p, q) = Complex(1, 0);
          h(q, p) = Complex(1, 0);
        }
        return h;
      }
    }
  throw DimensionError("hermitian basis: coordinate index out of range");
}

ComplexMatrix hermitian_from_coords(const RealVector& x, Index d) {
  if (x.size() != hermitian_coord_count(d))
    throw DimensionError("hermitian coords: expected d^2 coordinates");
  ComplexMatrix w = ComplexMatrix::Zero(d, d);
  for (Index p = 0; p < d; ++p) w(p, p) = Complex(x(p), 0);
  for (Index p = 0; p < d; ++p)
    for (Index q = p + 1; q < d; ++q) {
      const int base = static_cast<int>(d) + 2 * pair_slot(d, p, q);
      w(p, q) = Complex(x(base), x(base + 1));
      w(q, p) = std::conj(w(p, q));
    }
  return w;
}

RealVector coords_from_hermitian(const ComplexMatrix& w) {
  if (w.rows() != w.cols())
    throw DimensionError("hermitian coords: matrix must be square");
  const Index d = w.rows();
  RealVector x(hermitian_coord_count(d));
  for (Index p = 0; p < d; ++p) x(p) = w(p, p).real();
  for (Index p = 0; p < d; ++p)
    for (Index q = p + 1; q < d; ++q) {
      const int base = static_cast<int>(d) + 2 * pair_slot(d, p, q);
      x(base) = w(p, q).real();
      x(base + 1) = w(p, q).imag();
    }
  return x;
}

RealVector hermitian_pairing_vector(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw DimensionError("hermitian pairing: matrix must be square");
  const Index d = m.rows();
  RealVector v(hermitian_coord_count(d));
  for (Index p = 0; p < d; ++p) v(p) = m(p, p).real();
  for (Index p = 0; p < d; ++p)
    for (Index q = p + 1; q < d; ++q) {
      const int base = static_cast<int>(d) + 2 * pair_slot(d, p, q);
      v(base) = (m(q, p) + m(p, q)).real();
      v(base + 1) = (Complex(0, 1) * (m(q, p) - m(p, q))).real();
    }
  return v;
}

}  // namespace entwit
