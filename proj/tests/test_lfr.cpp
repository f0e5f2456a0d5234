#include <cmath>

#include "doctest.h"
#include "entwit/io.hpp"
#include "entwit/lfr.hpp"
#include "entwit/linalg.hpp"
#include "entwit/rng.hpp"
#include "entwit/types.hpp"
#include "test_helpers.hpp"

using namespace entwit;
using namespace entwit::testing;

namespace {

ComplexVector point(std::initializer_list<Complex> xs) {
  ComplexVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (Complex x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("lfr");

TEST_CASE("build_delta repeats parameters and applies conjugation") {
  DeltaStructure twice;
  twice.entries = {{0, false, 2}};
  const ComplexMatrix d1 = build_delta(twice, point({Complex(3, 1)}));
  REQUIRE(d1.rows() == 2);
  CHECK(d1(0, 0) == Complex(3, 1));
  CHECK(d1(1, 1) == Complex(3, 1));
  CHECK(d1(0, 1) == Complex(0, 0));

  DeltaStructure conj;
  conj.entries = {{0, true, 1}};
  const ComplexMatrix d2 = build_delta(conj, point({Complex(3, 1)}));
  CHECK(d2(0, 0) == Complex(3, -1));

  DeltaStructure mixed;
  mixed.entries = {{0, false, 1}, {1, false, 1}, {0, true, 2}};
  CHECK(mixed.size() == 4);
  CHECK(mixed.num_params() == 2);
  const ComplexMatrix d3 =
      build_delta(mixed, point({Complex(1, 2), Complex(0, -1)}));
  CHECK(d3(0, 0) == Complex(1, 2));
  CHECK(d3(1, 1) == Complex(0, -1));
  CHECK(d3(2, 2) == Complex(1, -2));
  CHECK(d3(3, 3) == Complex(1, -2));

  CHECK_THROWS_AS(build_delta(mixed, point({Complex(1, 0)})), DimensionError);
}

TEST_CASE("constant and parameter representations evaluate exactly") {
  const LFR five = constant_lfr(5.0 * ComplexMatrix::Identity(1, 1));
  CHECK(eval(five, ComplexVector(0))(0, 0) == Complex(5, 0));

  const LFR a0 = parameter_lfr(0, false);
  CHECK(eval(a0, point({Complex(2, 1)}))(0, 0) == Complex(2, 1));

  const LFR a0c = parameter_lfr(0, true);
  CHECK(eval(a0c, point({Complex(2, 1)}))(0, 0) == Complex(2, -1));
}

TEST_CASE("singular evaluation points are rejected as ill posed") {
  // F(a) = a / (1 - a): the feedback loop blows up at a = 1.
  const ComplexMatrix one = ComplexMatrix::Identity(1, 1);
  DeltaStructure s;
  s.entries = {{0, false, 1}};
  const LFR f(ComplexMatrix::Zero(1, 1), one, one, one, s);
  CHECK_THROWS_AS(eval(f, point({Complex(1, 0)})), IllPosedError);
  // Slightly off the pole it still evaluates.
  const ComplexMatrix v = eval(f, point({Complex(0.5, 0)}));
  CHECK(std::abs(v(0, 0) - Complex(1, 0)) < 1e-12);
  // Within the conditioning threshold of the pole it is also rejected.
  CHECK_THROWS_AS(eval(f, point({Complex(1 - 1e-14, 0)})), IllPosedError);
}

TEST_CASE("addition composes pointwise") {
  const LFR two = constant_lfr(2.0 * ComplexMatrix::Identity(1, 1));
  const LFR three = constant_lfr(3.0 * ComplexMatrix::Identity(1, 1));
  CHECK(eval(add(two, three), ComplexVector(0))(0, 0) == Complex(5, 0));

  // Adding the zero constant changes nothing anywhere.
  const LFR a0 = parameter_lfr(0, false);
  const LFR zero = constant_lfr(ComplexMatrix::Zero(1, 1));
  const LFR sum = add(a0, zero);
  Rng rng(10401);
  for (int t = 0; t < 20; ++t) {
    const ComplexVector a = point({rng.complex_normal()});
    CHECK(std::abs(eval(sum, a)(0, 0) - eval(a0, a)(0, 0)) < 1e-15);
  }
}

TEST_CASE("multiplication composes pointwise") {
  const LFR a0 = parameter_lfr(0, false);
  const LFR a0c = parameter_lfr(0, true);

  // a * conj(a) = |a|^2.
  const LFR sq = mul(a0, a0c);
  Rng rng(10402);
  for (int t = 0; t < 20; ++t) {
    const Complex a = rng.complex_normal();
    const Complex got = eval(sq, point({a}))(0, 0);
    CHECK(std::abs(got - Complex(std::norm(a), 0)) < 1e-12);
  }

  // Multiplying by the identity constant changes nothing.
  const LFR one = constant_lfr(ComplexMatrix::Identity(1, 1));
  const LFR same = mul(one, a0);
  CHECK(std::abs(eval(same, point({Complex(4, -3)}))(0, 0) - Complex(4, -3)) <
        1e-14);
}

TEST_CASE("random compositions evaluate to the composed values") {
  Rng rng(10403);
  // Build f = (a0 + c1) * (conj(a0) + c2) + c3 with random 2x2 constants and
  // compare against direct arithmetic at 100 random points.
  const ComplexMatrix c1 = rng.hermitian(2), c2 = rng.hermitian(2),
                      c3 = rng.hermitian(2);
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  DeltaStructure plain, conj;
  plain.entries = {{0, false, 2}};
  conj.entries = {{0, true, 2}};
  const LFR a_block(ComplexMatrix::Zero(2, 2), i2, i2,
                    ComplexMatrix::Zero(2, 2), plain);
  const LFR ac_block(ComplexMatrix::Zero(2, 2), i2, i2,
                     ComplexMatrix::Zero(2, 2), conj);
  const LFR f = add(
      mul(add(a_block, constant_lfr(c1)), add(ac_block, constant_lfr(c2))),
      constant_lfr(c3));
  for (int t = 0; t < 100; ++t) {
    const Complex a = rng.complex_normal();
    const ComplexMatrix want =
        (a * i2 + c1) * (std::conj(a) * i2 + c2) + c3;
    const ComplexMatrix got = eval(f, point({a}));
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("three-deep composition stays exact") {
  const LFR a0 = parameter_lfr(0, false);
  const LFR a1 = parameter_lfr(1, false);
  // ((a0 * a1) + a0) * a1 evaluated symbolically.
  const LFR f = mul(add(mul(a0, a1), a0), a1);
  Rng rng(10404);
  for (int t = 0; t < 50; ++t) {
    const Complex x = rng.complex_normal(), y = rng.complex_normal();
    const Complex want = (x * y + x) * y;
    const Complex got = eval(f, point({x, y}))(0, 0);
    CHECK(std::abs(got - want) < 1e-12);
  }
}

TEST_CASE("add and mul validate output shapes") {
  const LFR one = constant_lfr(ComplexMatrix::Identity(1, 1));
  const LFR two = constant_lfr(ComplexMatrix::Identity(2, 2));
  CHECK_THROWS_AS(add(one, two), DimensionError);
  CHECK_THROWS_AS(mul(two, one), DimensionError);
}

TEST_CASE("witness realization has the documented shape") {
  const Index dA = 2, dB = 2;
  const HermitianOperator w(identity(4) / Complex(4, 0));
  const LFR f = witness_lfr(w, dA, dB);
  const Index n = dA * dA * dB + dA * dB;  // 12
  CHECK(f.structure.size() == n);
  CHECK(f.structure.num_params() == dA);
  CHECK(f.a.rows() == dB);
  CHECK(f.a.cols() == dB);
  CHECK(f.a.cwiseAbs().maxCoeff() == 0.0);
  CHECK(f.b.rows() == dB);
  CHECK(f.b.cols() == n);
  CHECK(f.c.rows() == n);
  CHECK(f.c.cols() == dB);
  CHECK(f.d.rows() == n);
  // Strictly nilpotent feedback: D^2 = 0, so every point is well posed.
  CHECK((f.d * f.d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("witness realization evaluates to the contraction") {
  Rng rng(10405);
  const std::vector<std::pair<Index, Index>> shapes = {{2, 2}, {2, 3}, {3, 2}};
  for (auto [dA, dB] : shapes) {
    for (int t = 0; t < 10; ++t) {
      const HermitianOperator w(rng.hermitian(dA * dB));
      const LFR f = witness_lfr(w, dA, dB);
      const ComplexVector a = rng.unit_vector(dA);
      const ComplexMatrix got = eval(f, a);
      const ComplexMatrix want = contraction_oracle(w, a, dA, dB);
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("witness realization reproduces golden block values") {
  // Maximally mixed witness at any unit point: I/(dA dB).
  const HermitianOperator mixed(identity(4) / Complex(4, 0));
  Rng rng(10406);
  const ComplexMatrix flat = eval(witness_lfr(mixed, 2, 2), rng.unit_vector(2));
  CHECK((flat - identity(2) / Complex(4, 0)).cwiseAbs().maxCoeff() < 1e-14);

  // Corner witness contracted at e_0 picks out its (0,0) block diag(0, 1/2).
  const HermitianOperator oew =
      to_hermitian(read_matrix_file(data_path("witness_bell_oew.json")));
  const ComplexMatrix b00 =
      eval(witness_lfr(oew, 2, 2), point({Complex(1, 0), Complex(0, 0)}));
  CHECK(std::abs(b00(0, 0)) < 1e-14);
  CHECK(std::abs(b00(1, 1) - Complex(0.5, 0)) < 1e-14);
  CHECK(std::abs(b00(0, 1)) < 1e-14);
}

TEST_CASE("evaluation varies smoothly: finite differences match slopes") {
  Rng rng(10407);
  const HermitianOperator w(rng.hermitian(4));
  const LFR f = witness_lfr(w, 2, 2);
  const ComplexVector a = rng.unit_vector(2);
  const Real h = 1e-6;
  // Directional derivative along the real part of a_0, estimated centrally
  // and compared against a half-step estimate (Richardson consistency).
  ComplexVector ap = a, am = a;
  ap(0) += h;
  am(0) -= h;
  const ComplexMatrix d1 = (eval(f, ap) - eval(f, am)) / (2 * h);
  ap = a;
  am = a;
  ap(0) += h / 2;
  am(0) -= h / 2;
  const ComplexMatrix d2 = (eval(f, ap) - eval(f, am)) / h;
  CHECK((d1 - d2).cwiseAbs().maxCoeff() / std::max(1.0, d1.norm()) < 1e-4);
}

TEST_CASE("lfr constructor rejects inconsistent shapes") {
  DeltaStructure s;
  s.entries = {{0, false, 2}};
  const ComplexMatrix z22 = ComplexMatrix::Zero(2, 2);
  const ComplexMatrix z23 = ComplexMatrix::Zero(2, 3);
  CHECK_NOTHROW(LFR(z22, z22, z22, z22, s));
  CHECK_THROWS_AS(LFR(z22, z23, z22, z22, s), DimensionError);
  DeltaStructure bad;
  bad.entries = {{-1, false, 1}};
  CHECK_THROWS_AS(
      LFR(ComplexMatrix::Zero(1, 1), ComplexMatrix::Zero(1, 1),
          ComplexMatrix::Zero(1, 1), ComplexMatrix::Zero(1, 1), bad),
      InvariantError);
}

TEST_SUITE_END();
