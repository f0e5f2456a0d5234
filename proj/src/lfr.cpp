#include "entwit/lfr.hpp"

#include <Eigen/Dense>

#include "entwit/linalg.hpp"

namespace entwit {

LFR::LFR(ComplexMatrix a_, ComplexMatrix b_, ComplexMatrix c_,
         ComplexMatrix d_, DeltaStructure structure_)
    : a(std::move(a_)),
      b(std::move(b_)),
      c(std::move(c_)),
      d(std::move(d_)),
      structure(std::move(structure_)) {
  const Index n = a.rows(), cc = a.cols(), nn = structure.size();
  if (b.rows() != n || b.cols() != nn || c.rows() != nn || c.cols() != cc ||
      d.rows() != nn || d.cols() != nn)
    throw DimensionError(
        "lfr: shapes must satisfy A n x c, B n x N, C N x c, D N x N");
  for (const auto& e : structure.entries) {
    if (e.param < 0) throw InvariantError("lfr: parameter ids must be >= 0");
    if (e.repetition < 1)
      throw InvariantError("lfr: repetitions must be >= 1");
  }
}

ComplexMatrix build_delta(const DeltaStructure& structure,
                          const ComplexVector& a) {
  if (a.size() != structure.num_params())
    throw DimensionError(
        "build_delta: parameter vector length must cover all referenced ids");
  const Index n = structure.size();
  ComplexMatrix delta = ComplexMatrix::Zero(n, n);
  Index at = 0;
  for (const auto& e : structure.entries) {
    const Complex v = e.conjugated ? std::conj(a(e.param)) : a(e.param);
    for (Index r = 0; r < e.repetition; ++r) delta(at + r, at + r) = v;
    at += e.repetition;
  }
  return delta;
}

ComplexMatrix eval(const LFR& f, const ComplexVector& a) {
  const Index n = f.structure.size();
  if (n == 0) return f.a;
  const ComplexMatrix delta = build_delta(f.structure, a);
  const ComplexMatrix m = ComplexMatrix::Identity(n, n) - f.d * delta;
  Eigen::FullPivLU<ComplexMatrix> lu(m);
  if (!lu.isInvertible())
    throw IllPosedError("lfr eval: I - D Delta is singular at this point");
  const ComplexMatrix inv = lu.inverse();
  if (!inv.allFinite() || inv.norm() > tol::lfr_condition)
    throw IllPosedError(
        "lfr eval: inverse of I - D Delta exceeds the conditioning threshold");
  return f.a + f.b * delta * inv * f.c;
}

namespace {

DeltaStructure concat(const DeltaStructure& s1, const DeltaStructure& s2) {
  DeltaStructure out = s1;
  out.entries.insert(out.entries.end(), s2.entries.begin(), s2.entries.end());
  return out;
}

}  // namespace

LFR add(const LFR& f1, const LFR& f2) {
  if (f1.out_rows() != f2.out_rows() || f1.out_cols() != f2.out_cols())
    throw DimensionError("lfr add: output dimensions must match");
  const Index n1 = f1.structure.size(), n2 = f2.structure.size();
  ComplexMatrix b(f1.b.rows(), n1 + n2);
  b << f1.b, f2.b;
  ComplexMatrix c(n1 + n2, f1.c.cols());
  c << f1.c, f2.c;
  ComplexMatrix d = ComplexMatrix::Zero(n1 + n2, n1 + n2);
  d.topLeftCorner(n1, n1) = f1.d;
  d.bottomRightCorner(n2, n2) = f2.d;
  return LFR(f1.a + f2.a, b, c, d, concat(f1.structure, f2.structure));
}

LFR mul(const LFR& f1, const LFR& f2) {
  if (f1.out_cols() != f2.out_rows())
    throw DimensionError("lfr mul: inner dimensions must match");
  const Index n1 = f1.structure.size(), n2 = f2.structure.size();
  ComplexMatrix b(f1.b.rows(), n1 + n2);
  b << f1.b, f1.a * f2.b;
  ComplexMatrix c(n1 + n2, f2.c.cols());
  c << f1.c * f2.a, f2.c;
  ComplexMatrix d = ComplexMatrix::Zero(n1 + n2, n1 + n2);
  d.topLeftCorner(n1, n1) = f1.d;
  d.topRightCorner(n1, n2) = f1.c * f2.b;
  d.bottomRightCorner(n2, n2) = f2.d;
  return LFR(f1.a * f2.a, b, c, d, concat(f1.structure, f2.structure));
}

LFR constant_lfr(const ComplexMatrix& a0) {
  const Index n = a0.rows(), c = a0.cols();
  return LFR(a0, ComplexMatrix::Zero(n, 0), ComplexMatrix::Zero(0, c),
             ComplexMatrix::Zero(0, 0), DeltaStructure{});
}

LFR parameter_lfr(int param, bool conjugated) {
  DeltaStructure s;
  s.entries.push_back({param, conjugated, 1});
  return LFR(ComplexMatrix::Zero(1, 1), ComplexMatrix::Ones(1, 1),
             ComplexMatrix::Ones(1, 1), ComplexMatrix::Zero(1, 1), s);
}

LFR witness_lfr(const HermitianOperator& w, Index dA, Index dB) {
  if (w.dim() != dA * dB)
    throw DimensionError("witness_lfr: operator dimension must equal dA*dB");
  const Index n1 = dA * dA * dB;  // plain parameters, each repeated dA*dB
  const Index n2 = dA * dB;       // conjugated parameters, each repeated dB
  const Index n = n1 + n2;

  DeltaStructure structure;
  for (Index i = 0; i < dA; ++i)
    structure.entries.push_back({static_cast<int>(i), false, dA * dB});
  for (Index i = 0; i < dA; ++i)
    structure.entries.push_back({static_cast<int>(i), true, dB});

  // B carries the subsystem blocks: the slot (k, j) — outer index k over the
  // plain parameters, inner index j — holds W_{jk}, so that pushing Delta
  // through D and C accumulates sum_{k,j} a_k conj(a_j) W_{jk}.
  ComplexMatrix b = ComplexMatrix::Zero(dB, n);
  for (Index k = 0; k < dA; ++k)
    for (Index j = 0; j < dA; ++j)
      b.block(0, (k * dA + j) * dB, dB, dB) =
          w.matrix().block(j * dB, k * dB, dB, dB);

  ComplexMatrix c = ComplexMatrix::Zero(n, dB);
  for (Index i = 0; i < dA; ++i)
    c.block(n1 + i * dB, 0, dB, dB) = identity(dB);

  // D feeds the conjugated-parameter outputs back into every plain group;
  // it is strictly block-triangular, hence nilpotent: every evaluation
  // point is well posed.
  ComplexMatrix d = ComplexMatrix::Zero(n, n);
  for (Index k = 0; k < dA; ++k)
    d.block(k * dA * dB, n1, dA * dB, dA * dB) =
        ComplexMatrix::Identity(dA * dB, dA * dB);

  return LFR(ComplexMatrix::Zero(dB, dB), b, c, d, structure);
}

}  // namespace entwit
