#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "entwit/types.hpp"

namespace entwit {

/// Kronecker product a (x) b.  Generic over Eigen expressions so products,
/// sums and blocks can be passed without materializing them first; the
/// result scalar follows Eigen's binary-op promotion rules.
///
/// Index convention: (a (x) b)[(i*rb + k), (j*cb + l)] = a(i,j) * b(k,l).
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a,
          const Eigen::MatrixBase<DerivedB>& b) {
  using ScalarA = typename DerivedA::Scalar;
  using ScalarB = typename DerivedB::Scalar;
  using Scalar = typename Eigen::ScalarBinaryOpTraits<ScalarA, ScalarB,
      Eigen::internal::scalar_product_op<ScalarA, ScalarB>>::ReturnType;
  using Result = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  const Index ra = a.rows(), ca = a.cols();
  const Index rb = b.rows(), cb = b.cols();
  Result out(ra * rb, ca * cb);
  for (Index i = 0; i < ra; ++i)
    for (Index j = 0; j < ca; ++j)
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b.derived();
  return out;
}

/// Extracts the (i, j) subsystem block of a bipartite operator w on
/// H_A (x) H_B, i.e. the dB x dB matrix <i|_A w |j>_A in the product basis
/// |i>_A (x) |k>_B  ->  row i*dB + k.  Satisfies block(w,i,j) =
/// block(w,j,i)^dagger for Hermitian w.
inline ComplexMatrix block(const HermitianOperator& w, Index i, Index j,
                           Index dA, Index dB) {
  if (w.dim() != dA * dB)
    throw DimensionError("block: operator dimension must equal dA*dB");
  if (i < 0 || i >= dA || j < 0 || j >= dA)
    throw DimensionError("block: subsystem indices out of range");
  return w.matrix().block(i * dB, j * dB, dB, dB);
}

/// Ascending real eigenvalues of a Hermitian operator.  The spectrum of the
/// certified-Hermitian input is real by construction; values are returned
/// sorted, summing to the trace.
inline RealVector eigenvalues(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix(),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Smallest eigenvalue of a Hermitian matrix given as a raw expression;
/// the input is symmetrized against roundoff before decomposition.
template <typename Derived>
Real min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  ComplexMatrix h = m.template cast<Complex>();
  h = (h + h.adjoint()) / Complex(2, 0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Partial transpose of a bipartite density operator on the chosen
/// subsystem (0 = first factor, 1 = second).  Preserves Hermiticity and
/// trace; applied twice it is the identity.
inline HermitianOperator partial_transpose(const DensityOperator& rho,
                                           Index sys) {
  if (!rho.bipartite())
    throw DimensionError("partial_transpose: state must be bipartite");
  if (sys != 0 && sys != 1)
    throw DimensionError("partial_transpose: subsystem index out of range");
  const Index dA = rho.dims()[0], dB = rho.dims()[1];
  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out(m.rows(), m.cols());
  for (Index i = 0; i < dA; ++i)
    for (Index j = 0; j < dA; ++j) {
      const auto blk = m.block(i * dB, j * dB, dB, dB);
      if (sys == 0)
        out.block(j * dB, i * dB, dB, dB) = blk;
      else
        out.block(i * dB, j * dB, dB, dB) = blk.transpose();
    }
  return HermitianOperator(out);
}

/// True when the smallest eigenvalue of h is >= -tolerance.
inline bool is_psd(const HermitianOperator& h, Real tolerance) {
  return eigenvalues(h).minCoeff() >= -tolerance;
}

/// Re tr(a b) for Hermitian a, b — the canonical real pairing.  For
/// Hermitian inputs the imaginary part of tr(ab) vanishes up to roundoff.
inline Real trace_product(const HermitianOperator& a,
                          const HermitianOperator& b) {
  if (a.dim() != b.dim())
    throw DimensionError("trace_product: operators must share a dimension");
  return a.matrix().cwiseProduct(b.matrix().transpose()).sum().real();
}

/// Identity matrix shorthand.
inline ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

}  // namespace entwit
