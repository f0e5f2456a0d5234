#pragma once

#include <vector>

#include "entwit/types.hpp"

namespace entwit {

/// One diagonal group of a structured parameter block: the parameter with
/// the given id (optionally conjugated) repeated `repetition` times.
struct DeltaEntry {
  int param = 0;
  bool conjugated = false;
  Index repetition = 1;
};

/// Shape of the structured diagonal Delta = Diag(d_1 I_{r_1}, ..., d_k I_{r_k})
/// where each d_t is a parameter a_i or its conjugate.
struct DeltaStructure {
  std::vector<DeltaEntry> entries;

  /// Total diagonal size N = sum of repetitions.
  Index size() const {
    Index n = 0;
    for (const auto& e : entries) n += e.repetition;
    return n;
  }

  /// Number of distinct parameters referenced (= max id + 1).
  int num_params() const {
    int n = 0;
    for (const auto& e : entries) n = std::max(n, e.param + 1);
    return n;
  }
};

/// Linear fractional representation F(a) = A + B Delta (I - D Delta)^{-1} C
/// with Delta built from `structure` at the parameter point a.  Shapes:
/// A is n x c, B is n x N, C is N x c, D is N x N for N = structure.size().
struct LFR {
  LFR(ComplexMatrix a_, ComplexMatrix b_, ComplexMatrix c_, ComplexMatrix d_,
      DeltaStructure structure_);

  ComplexMatrix a, b, c, d;
  DeltaStructure structure;

  Index out_rows() const { return a.rows(); }
  Index out_cols() const { return a.cols(); }
};

/// The structured diagonal at a concrete parameter vector.
ComplexMatrix build_delta(const DeltaStructure& structure,
                          const ComplexVector& a);

/// Evaluates F(a).  Throws IllPosedError when (I - D Delta) is singular or
/// its inverse has norm above tol::lfr_condition.
ComplexMatrix eval(const LFR& f, const ComplexVector& a);

/// Pointwise sum: eval(add(f1, f2), a) = eval(f1, a) + eval(f2, a).  The
/// parameter block of the result is Diag(Delta_1, Delta_2).
LFR add(const LFR& f1, const LFR& f2);

/// Pointwise product: eval(mul(f1, f2), a) = eval(f1, a) * eval(f2, a).
LFR mul(const LFR& f1, const LFR& f2);

/// Constant representation (B, C, D empty): eval == a0 everywhere.
LFR constant_lfr(const ComplexMatrix& a0);

/// Scalar representation of a single parameter (or its conjugate):
/// A = 0, B = C = 1, D = 0.
LFR parameter_lfr(int param, bool conjugated);

/// The rational realization of the witness contraction: an LFR with A = 0
/// whose evaluation at a equals sum_ij conj(a_i) a_j W_ij, the subsystem-A
/// contraction of w.  Delta repeats each plain parameter dA*dB times and
/// each conjugated parameter dB times (N = dA^2 dB + dA dB); D is strictly
/// block-triangular, so every evaluation point is well posed.
LFR witness_lfr(const HermitianOperator& w, Index dA, Index dB);

}  // namespace entwit
