#pragma once

#include <cstdint>
#include <vector>

#include "entwit/types.hpp"
#include "entwit/witness.hpp"

namespace entwit {

/// A bipartition of the subsystems {0..n-1} into two non-empty,
/// order-preserving index groups.  Each group flattens to a single tensor
/// factor, turning an n-party state into a bipartite one.
struct Cut {
  std::vector<Index> left;
  std::vector<Index> right;

  /// Throws unless the groups are non-empty, strictly increasing, disjoint
  /// and jointly cover {0..n-1}.
  void validate(std::size_t n) const;
};

/// Every bipartition of n >= 2 subsystems with subsystem 0 on the left
/// (fixing 0 removes the mirror duplicates): 2^(n-1) - 1 cuts, ordered by
/// the membership bitmask of the left group.
std::vector<Cut> all_cuts(std::size_t n);

/// The unitary permutation P with P|x_0, ..., x_{n-1}> =
/// |x_{order(0)}, ..., x_{order(n-1)}> where order = (cut.left, cut.right):
/// conjugating by P regroups the tensor factors so the cut's two groups
/// become contiguous.
ComplexMatrix cut_permutation(const std::vector<Index>& dims, const Cut& cut);

/// P rho P^dagger reinterpreted as a bipartite state with dimensions
/// (prod of left dims, prod of right dims).
DensityOperator flatten_cut(const DensityOperator& rho, const Cut& cut);

/// Pulls a witness on the flattened cut space back to the original tensor
/// ordering, P^dagger W P, so that tr(W' rho) = tr(W flatten_cut(rho)).
/// Block positivity survives the pull-back because permutations map product
/// vectors to product vectors.
HermitianOperator lift_cut_witness(const HermitianOperator& w,
                                   const std::vector<Index>& dims,
                                   const Cut& cut);

/// Contracts W against the first n-1 subsystems with the given coefficient
/// vectors, returning the d_n x d_n matrix
/// (<a1| (x) ... (x) <a_{n-1}| (x) I) W (|a1> (x) ... (x) |a_{n-1}> (x) I);
/// entrywise the nested sum
/// sum conj(a1_{i1}) ... conj(a_{n-1, i_{n-1}}) a1_{j1} ... a_{n-1, j_{n-1}}
/// W_{i1..i_{n-1}, j1..j_{n-1}} with each index running over its own
/// subsystem dimension.  n = 2 reduces to evaluate_robust_constraint.
ComplexMatrix evaluate_multipartite_constraint(
    const HermitianOperator& w, const std::vector<ComplexVector>& coeffs,
    const std::vector<Index>& dims);

/// Detection across bipartite cuts: the witness relaxation runs once per
/// cut of an n >= 3 party state (a violation on any cut rules out full
/// separability).  Returns the verdict per cut, ordered as all_cuts orders
/// them.
struct CutDetection {
  Cut cut;
  Verdict verdict;
};
std::vector<CutDetection> detect_across_cuts(
    const DensityOperator& rho, const DetectionSettings& settings = {});

/// Merges detect_across_cuts into a single verdict: Entangled with the most
/// negative cut value when any cut fires, otherwise Inconclusive with the
/// minimum value over cuts.  The attached witness lives on the winning
/// cut's flattened space; method is "cuts".  Ties resolve to the earliest
/// cut.
Verdict detect_multipartite(const DensityOperator& rho,
                            const DetectionSettings& settings = {});

/// Cyclic coordinate descent for the minimum of <prod| W |prod> over n-fold
/// product states: each step replaces one factor by the smallest
/// eigenvector of W contracted against all the others, so the value is
/// non-increasing within a sweep.  Factors are drawn per restart from
/// deterministic derived seeds in subsystem order; n = 2 runs the same
/// iteration as seesaw_min_product.
SeesawResult seesaw_min_product_n(const HermitianOperator& w,
                                  const std::vector<Index>& dims, int restarts,
                                  int iters, std::uint64_t seed);

}  // namespace entwit
