#include "entwit/multipartite.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "entwit/linalg.hpp"
#include "entwit/rng.hpp"

namespace entwit {

namespace {

Index dims_product(const std::vector<Index>& dims,
                   const std::vector<Index>& group) {
  Index prod = 1;
  for (Index k : group) prod *= dims[static_cast<std::size_t>(k)];
  return prod;
}

}  // namespace

void Cut::validate(std::size_t n) const {
  if (left.empty() || right.empty())
    throw InvariantError("cut: both groups must be non-empty");
  std::vector<bool> seen(n, false);
  for (const auto* group : {&left, &right}) {
    for (std::size_t i = 0; i < group->size(); ++i) {
      const Index k = (*group)[i];
      if (k < 0 || static_cast<std::size_t>(k) >= n)
        throw InvariantError("cut: subsystem index out of range");
      if (seen[static_cast<std::size_t>(k)])
        throw InvariantError("cut: groups must be disjoint");
      seen[static_cast<std::size_t>(k)] = true;
      if (i > 0 && (*group)[i - 1] >= k)
        throw InvariantError("cut: groups must be strictly increasing");
    }
  }
  if (left.size() + right.size() != n)
    throw InvariantError("cut: groups must cover every subsystem");
}

std::vector<Cut> all_cuts(std::size_t n) {
  if (n < 2) throw DimensionError("all_cuts: needs at least two subsystems");
  std::vector<Cut> cuts;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t mask = 1; mask < full; mask += 2) {
    Cut cut;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (std::uint64_t{1} << k))
        cut.left.push_back(static_cast<Index>(k));
      else
        cut.right.push_back(static_cast<Index>(k));
    }
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

ComplexMatrix cut_permutation(const std::vector<Index>& dims, const Cut& cut) {
  const std::size_t n = dims.size();
  cut.validate(n);

  std::vector<Index> order = cut.left;
  order.insert(order.end(), cut.right.begin(), cut.right.end());

  // Row-major strides (first subsystem most significant), matching the
  // Kronecker-product index convention used everywhere else.
  std::vector<Index> stride(n, 1), new_stride(n, 1);
  for (std::size_t k = n - 1; k-- > 0;)
    stride[k] = stride[k + 1] * dims[k + 1];
  for (std::size_t m = n - 1; m-- > 0;)
    new_stride[m] =
        new_stride[m + 1] * dims[static_cast<std::size_t>(order[m + 1])];

  Index total = 1;
  for (Index d : dims) total *= d;

  ComplexMatrix p = ComplexMatrix::Zero(total, total);
  std::vector<Index> idx(n);
  for (Index x = 0; x < total; ++x) {
    Index rem = x;
    for (std::size_t k = 0; k < n; ++k) {
      idx[k] = rem / stride[k];
      rem %= stride[k];
    }
    Index y = 0;
    for (std::size_t m = 0; m < n; ++m)
      y += idx[static_cast<std::size_t>(order[m])] * new_stride[m];
    p(y, x) = Complex(1, 0);
  }
  return p;
}

DensityOperator flatten_cut(const DensityOperator& rho, const Cut& cut) {
  const std::vector<Index>& dims = rho.dims();
  cut.validate(dims.size());
  const ComplexMatrix p = cut_permutation(dims, cut);
  const ComplexMatrix flat = symmetrize(p * rho.matrix() * p.adjoint());
  return DensityOperator(
      {dims_product(dims, cut.left), dims_product(dims, cut.right)},
      HermitianOperator(flat));
}

HermitianOperator lift_cut_witness(const HermitianOperator& w,
                                   const std::vector<Index>& dims,
                                   const Cut& cut) {
  cut.validate(dims.size());
  const ComplexMatrix p = cut_permutation(dims, cut);
  if (w.dim() != p.rows())
    throw DimensionError(
        "lift_cut_witness: witness dimension must equal the full space");
  return HermitianOperator(symmetrize(p.adjoint() * w.matrix() * p));
}

ComplexMatrix evaluate_multipartite_constraint(
    const HermitianOperator& w, const std::vector<ComplexVector>& coeffs,
    const std::vector<Index>& dims) {
  const std::size_t n = dims.size();
  if (n < 2)
    throw DimensionError(
        "evaluate_multipartite_constraint: needs at least two subsystems");
  if (coeffs.size() + 1 != n)
    throw DimensionError(
        "evaluate_multipartite_constraint: needs one coefficient vector per "
        "subsystem except the last");
  Index total = 1;
  for (Index d : dims) total *= d;
  if (w.dim() != total)
    throw DimensionError(
        "evaluate_multipartite_constraint: operator dimension must equal the "
        "product of the subsystem dimensions");
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (coeffs[k].size() != dims[k])
      throw DimensionError(
          "evaluate_multipartite_constraint: coefficient vector length must "
          "match its subsystem dimension");
    if (!coeffs[k].allFinite())
      throw InvariantError(
          "evaluate_multipartite_constraint: coefficients must be finite");
  }

  ComplexMatrix contract = ComplexMatrix::Ones(1, 1);
  for (std::size_t k = 0; k + 1 < n; ++k) contract = kron(contract, coeffs[k]);
  const ComplexMatrix k_op = kron(contract, identity(dims.back()));
  return (k_op.adjoint() * w.matrix() * k_op).eval();
}

std::vector<CutDetection> detect_across_cuts(const DensityOperator& rho,
                                             const DetectionSettings& settings) {
  if (rho.dims().size() < 3)
    throw DimensionError(
        "detect_across_cuts: needs at least three subsystems");
  std::vector<CutDetection> out;
  for (Cut& cut : all_cuts(rho.dims().size())) {
    const DensityOperator flat = flatten_cut(rho, cut);
    out.push_back(
        CutDetection{std::move(cut), detect_entanglement(flat, settings)});
  }
  return out;
}

Verdict detect_multipartite(const DensityOperator& rho,
                            const DetectionSettings& settings) {
  const std::vector<CutDetection> cuts = detect_across_cuts(rho, settings);
  const CutDetection* best = &cuts.front();
  for (const CutDetection& c : cuts)
    if (c.verdict.value < best->verdict.value) best = &c;

  Verdict merged = best->verdict;
  merged.method = "cuts";
  return merged;
}

SeesawResult seesaw_min_product_n(const HermitianOperator& w,
                                  const std::vector<Index>& dims, int restarts,
                                  int iters, std::uint64_t seed) {
  const std::size_t n = dims.size();
  if (n < 2)
    throw DimensionError(
        "seesaw_min_product_n: needs at least two subsystems");
  Index total = 1;
  for (Index d : dims) total *= d;
  if (w.dim() != total)
    throw DimensionError(
        "seesaw_min_product_n: operator dimension must equal the product of "
        "the subsystem dimensions");
  if (restarts < 1 || iters < 1)
    throw InvariantError(
        "seesaw_min_product_n: restarts and iters must be >= 1");

  Real best = std::numeric_limits<Real>::infinity();
  std::vector<ComplexVector> best_factors;

  for (int r = 0; r < restarts; ++r) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(r));
    std::vector<ComplexVector> factors(n);
    for (std::size_t k = 0; k < n; ++k) factors[k] = rng.unit_vector(dims[k]);

    Real value = std::numeric_limits<Real>::infinity();
    Real prev = value;
    for (int it = 0; it < iters; ++it) {
      for (std::size_t k = 0; k < n; ++k) {
        // W contracted against every factor but the k-th: a d_k x d_k
        // matrix whose smallest eigenvector is the optimal k-th factor.
        ComplexMatrix contract = ComplexMatrix::Ones(1, 1);
        for (std::size_t j = 0; j < n; ++j)
          contract = kron(contract, j == k
                                        ? ComplexMatrix(identity(dims[j]))
                                        : ComplexMatrix(factors[j]));
        const ComplexMatrix mk =
            symmetrize(contract.adjoint() * w.matrix() * contract);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(mk);
        factors[k] = es.eigenvectors().col(0);
        value = es.eigenvalues()(0);
      }
      if (std::abs(value - prev) < tol::seesaw_converge) break;
      prev = value;
    }
    if (value < best) {
      best = value;
      best_factors = std::move(factors);
    }
  }

  for (ComplexVector& f : best_factors) f /= f.norm();
  return SeesawResult{best, ProductState(std::move(best_factors))};
}

}  // namespace entwit
