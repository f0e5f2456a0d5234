#include <cmath>

#include "doctest.h"
#include "entwit/io.hpp"
#include "entwit/linalg.hpp"
#include "entwit/multipartite.hpp"
#include "entwit/rng.hpp"
#include "entwit/types.hpp"
#include "entwit/witness.hpp"
#include "test_helpers.hpp"

using namespace entwit;
using namespace entwit::testing;

namespace {

DensityOperator ghz() {
  return to_density(read_matrix_file(data_path("ghz_state.json")));
}

DensityOperator triple_product_zero() {
  ComplexMatrix m = ComplexMatrix::Zero(8, 8);
  m(0, 0) = 1.0;
  return DensityOperator({2, 2, 2}, HermitianOperator(m));
}

}  // namespace

TEST_SUITE_BEGIN("multipartite");

TEST_CASE("all_cuts enumerates bipartitions with subsystem 0 on the left") {
  const std::vector<Cut> three = all_cuts(3);
  REQUIRE(three.size() == 3);
  CHECK(three[0].left == std::vector<Index>{0});
  CHECK(three[0].right == std::vector<Index>{1, 2});
  CHECK(three[1].left == std::vector<Index>{0, 1});
  CHECK(three[1].right == std::vector<Index>{2});
  CHECK(three[2].left == std::vector<Index>{0, 2});
  CHECK(three[2].right == std::vector<Index>{1});
  for (const Cut& c : three) CHECK_NOTHROW(c.validate(3));

  const std::vector<Cut> two = all_cuts(2);
  REQUIRE(two.size() == 1);
  CHECK(two[0].left == std::vector<Index>{0});
  CHECK(two[0].right == std::vector<Index>{1});

  CHECK(all_cuts(4).size() == 7);
}

TEST_CASE("cut validation rejects malformed bipartitions") {
  CHECK_THROWS_AS((Cut{{}, {0, 1}}.validate(2)), InvariantError);
  CHECK_THROWS_AS((Cut{{0}, {2}}.validate(2)), InvariantError);
  CHECK_THROWS_AS((Cut{{0, 1}, {1}}.validate(3)), InvariantError);
  CHECK_THROWS_AS((Cut{{1, 0}, {2}}.validate(3)), InvariantError);
  CHECK_THROWS_AS((Cut{{0}, {1}}.validate(3)), InvariantError);
  CHECK_NOTHROW((Cut{{0, 2}, {1}}.validate(3)));
}

TEST_CASE("cut permutations are permutation matrices") {
  const std::vector<Index> dims = {2, 3, 2};
  const Cut cut{{0, 2}, {1}};
  const ComplexMatrix p = cut_permutation(dims, cut);
  REQUIRE(p.rows() == 12);
  // Unitary with exactly one unit entry per row and column.
  CHECK((p * p.adjoint() - identity(12)).cwiseAbs().maxCoeff() == 0.0);
  for (Index i = 0; i < p.rows(); ++i) {
    CHECK(p.row(i).cwiseAbs().sum() == 1.0);
    CHECK(p.col(i).cwiseAbs().sum() == 1.0);
  }
}

TEST_CASE("the trivial bipartite cut flattens to the same matrix") {
  Rng rng(12601);
  const DensityOperator rho = random_density({2, 3}, rng);
  const DensityOperator flat = flatten_cut(rho, Cut{{0}, {1}});
  CHECK(flat.dims() == std::vector<Index>{2, 3});
  CHECK((flat.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flattening preserves trace, spectrum and positivity") {
  Rng rng(12602);
  const DensityOperator rho = random_density({2, 2, 3}, rng);
  for (const Cut& cut : all_cuts(3)) {
    std::vector<Index> want_dims(2);
    want_dims[0] = 1;
    for (Index i : cut.left) want_dims[0] *= rho.dims()[i];
    want_dims[1] = rho.dim() / want_dims[0];
    const DensityOperator flat = flatten_cut(rho, cut);
    CHECK(flat.dims() == want_dims);
    // Unitary conjugation: the full spectrum is unchanged.
    const RealVector before = eigenvalues(rho.op());
    const RealVector after = eigenvalues(flat.op());
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("lifting a witness undoes the cut permutation on pairings") {
  Rng rng(12603);
  const DensityOperator rho = random_density({2, 2, 2}, rng);
  const Cut cut{{0, 2}, {1}};
  const DensityOperator flat = flatten_cut(rho, cut);
  const HermitianOperator w(rng.hermitian(8));
  const HermitianOperator lifted = lift_cut_witness(w, rho.dims(), cut);
  CHECK(std::abs(trace_product(lifted, rho.op()) -
                 trace_product(w, flat.op())) < 1e-12);
}

TEST_CASE("multipartite contraction picks out corner blocks at basis vectors") {
  Rng rng(12604);
  const std::vector<Index> dims = {2, 2, 2};
  const HermitianOperator w(rng.hermitian(8));
  ComplexVector e0(2);
  e0 << 1, 0;
  const ComplexMatrix got =
      evaluate_multipartite_constraint(w, {e0, e0}, dims);
  CHECK((got - w.matrix().topLeftCorner(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("multipartite contraction of the mixed witness is flat") {
  const std::vector<Index> dims = {2, 2, 2};
  const HermitianOperator w(identity(8) / Complex(8, 0));
  Rng rng(12605);
  const ComplexMatrix got = evaluate_multipartite_constraint(
      w, {rng.unit_vector(2), rng.unit_vector(2)}, dims);
  CHECK((got - identity(2) / Complex(8, 0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("multipartite contraction matches the nested-sum reference") {
  Rng rng(12606);
  const std::vector<Index> dims = {2, 3, 2};
  for (int t = 0; t < 10; ++t) {
    const HermitianOperator w(rng.hermitian(12));
    const std::vector<ComplexVector> as = {rng.unit_vector(2),
                                           rng.unit_vector(3)};
    const ComplexMatrix got = evaluate_multipartite_constraint(w, as, dims);
    const ComplexMatrix want = contraction_oracle_n(w, as, dims);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("two-party contraction reduces to the bipartite evaluation") {
  Rng rng(12607);
  const HermitianOperator w(rng.hermitian(6));
  const ComplexVector a = rng.unit_vector(2);
  const ComplexMatrix got =
      evaluate_multipartite_constraint(w, {a}, {2, 3});
  const ComplexMatrix want = evaluate_robust_constraint(w, a, 2, 3);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("multipartite contraction scales as the product of |lambda_i|^2") {
  Rng rng(12608);
  const HermitianOperator w(rng.hermitian(8));
  const std::vector<Index> dims = {2, 2, 2};
  const ComplexVector a1 = rng.unit_vector(2), a2 = rng.unit_vector(2);
  const ComplexMatrix base =
      evaluate_multipartite_constraint(w, {a1, a2}, dims);
  const Complex l1(2, 0), l2(0, -0.5);
  const ComplexMatrix scaled = evaluate_multipartite_constraint(
      w, {(l1 * a1).eval(), (l2 * a2).eval()}, dims);
  const Real mag = std::norm(l1) * std::norm(l2);
  CHECK((scaled - mag * base).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("three-qubit GHZ state is detected on every cut") {
  const std::vector<CutDetection> per_cut = detect_across_cuts(ghz());
  REQUIRE(per_cut.size() == 3);
  // First subsystem versus the rest: same optimum as the two-qubit
  // maximally entangled state under the 2 x 4 relaxation.
  CHECK(per_cut[0].verdict.kind == VerdictKind::Entangled);
  CHECK(std::abs(per_cut[0].verdict.value - (-0.18301270)) < 1e-3);
  // The grouped cuts flatten to 4 x 2 and are weaker but still conclusive.
  CHECK(per_cut[1].verdict.kind == VerdictKind::Entangled);
  CHECK(std::abs(per_cut[1].verdict.value - (-0.02638540)) < 1e-3);
  CHECK(per_cut[2].verdict.kind == VerdictKind::Entangled);
  CHECK(std::abs(per_cut[2].verdict.value - (-0.02638540)) < 1e-3);

  const Verdict merged = detect_multipartite(ghz());
  CHECK(merged.kind == VerdictKind::Entangled);
  CHECK(merged.method == "cuts");
  CHECK(std::abs(merged.value - (-0.18301270)) < 1e-3);
  REQUIRE(merged.witness.has_value());
  CHECK(merged.witness->dA == 2);
  CHECK(merged.witness->dB == 4);
}

TEST_CASE("the lifted winning witness is block positive on products") {
  const Verdict merged = detect_multipartite(ghz());
  REQUIRE(merged.witness.has_value());
  const HermitianOperator lifted =
      lift_cut_witness(merged.witness->op, {2, 2, 2}, Cut{{0}, {1, 2}});
  CHECK(std::abs(trace_product(lifted, ghz().op()) - merged.value) < 1e-9);
  const SeesawResult r = seesaw_min_product_n(lifted, {2, 2, 2}, 8, 200, 21);
  CHECK(r.value >= -1e-7);
}

TEST_CASE("the maximally mixed three-qubit state stays inconclusive") {
  const DensityOperator mixed(
      {2, 2, 2}, HermitianOperator(identity(8) / Complex(8, 0)));
  const std::vector<CutDetection> per_cut = detect_across_cuts(mixed);
  for (const CutDetection& cd : per_cut) {
    CHECK(cd.verdict.kind == VerdictKind::Inconclusive);
    CHECK(cd.verdict.value >= -1e-6);
  }
  const Verdict merged = detect_multipartite(mixed);
  CHECK(merged.kind == VerdictKind::Inconclusive);
}

TEST_CASE("a pure product state stays inconclusive") {
  const Verdict merged = detect_multipartite(triple_product_zero());
  CHECK(merged.kind == VerdictKind::Inconclusive);
}

TEST_CASE("separable three-party mixtures never fire") {
  for (std::uint64_t seed = 40; seed < 44; ++seed) {
    const DensityOperator rho = sample_separable({2, 2, 2}, 3, seed);
    const Verdict merged = detect_multipartite(rho);
    CHECK_MESSAGE(merged.kind == VerdictKind::Inconclusive, "seed ", seed,
                  " value ", merged.value);
  }
}

TEST_CASE("n-party see-saw on the mixed operator returns 1/8") {
  const HermitianOperator w(identity(8) / Complex(8, 0));
  const SeesawResult r = seesaw_min_product_n(w, {2, 2, 2}, 4, 50, 2);
  CHECK(r.value == doctest::Approx(0.125).epsilon(1e-12));
  REQUIRE(r.state.factors.size() == 3);
  for (const ComplexVector& f : r.state.factors)
    CHECK(std::abs(f.norm() - 1.0) < 1e-12);
}

TEST_CASE("two-party see-saw agrees with the bipartite implementation") {
  Rng rng(12609);
  const HermitianOperator w(rng.hermitian(6));
  const SeesawResult a = seesaw_min_product(w, 2, 3, 6, 100, 33);
  const SeesawResult b = seesaw_min_product_n(w, {2, 3}, 6, 100, 33);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
}

TEST_CASE("cut detection requires at least three subsystems") {
  Rng rng(12610);
  const DensityOperator bi = random_density({2, 2}, rng);
  CHECK_THROWS_AS(detect_across_cuts(bi), DimensionError);
  CHECK_THROWS_AS(detect_multipartite(bi), DimensionError);
}

TEST_SUITE_END();
