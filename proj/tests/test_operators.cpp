#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "woldkit/fixtures.hpp"
#include "woldkit/operators.hpp"

using namespace woldkit;

namespace {

const ToleranceConfig cfg{};

Operator j_op(int depth) { return Operator(truncated_shift(depth)); }

ComplexMatrix interior_of(int depth) {
  ComplexMatrix p = ComplexMatrix::Identity(depth, depth);
  p(depth - 1, depth - 1) = 0.0;
  return p;
}

}  // namespace

TEST_CASE("operator validation and arithmetic") {
  CHECK_THROWS_AS(Operator(ComplexMatrix::Zero(2, 3)), InputError);
  ComplexMatrix nan = ComplexMatrix::Zero(2, 2);
  nan(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Operator{nan}, InputError);

  const Operator a = j_op(3);
  const Operator sq = a * a;
  ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
  expected(2, 0) = 1.0;  // J3^2 sends e0 to e2 and kills the rest
  CHECK(spectral_norm(sq.mat() - expected) == 0.0);
  CHECK(spectral_norm(a.adjoint().mat() - a.mat().adjoint().eval()) == 0.0);
  CHECK_THROWS_AS(Operator::identity(2) * Operator::identity(3), InputError);
}

TEST_CASE("spectral norm is the largest singular value") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = Complex(0.0, 2.0);
  CHECK(spectral_norm(m) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(spectral_norm(ComplexMatrix(0, 0)) == 0.0);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -4.0;
  CHECK(spectral_norm(d) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("defect report for the truncated shift") {
  const std::vector<Operator> ops = {j_op(3)};

  // Against the identity interior, the raw truncation defect is visible.
  DefectReport raw = defect_report(ops, Operator::identity(3));
  CHECK(raw.max_isometry() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(raw.max_interior_isometry() == doctest::Approx(1.0).epsilon(1e-14));

  // The true interior projector masks the top grade exactly.
  DefectReport masked = defect_report(ops, Operator(interior_of(3)));
  CHECK(masked.max_isometry() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(masked.max_interior_isometry() < 1e-15);
  CHECK(masked.commutation_defect == 0.0);

  const auto map = masked.as_map();
  CHECK(map.count("isometry") == 1);
  CHECK(map.count("interior_isometry") == 1);
  CHECK(map.count("commutation") == 1);
  CHECK(map.count("double_commutation") == 1);
}

TEST_CASE("the equal-truncated-shift pair fails only double commutation") {
  // V1 = V2 = J3 commute trivially but J3 J3* - J3* J3 = diag(-1, 0, 1).
  const std::vector<Operator> ops = {j_op(3), j_op(3)};
  const IsometryTuple tuple(ops, Operator(interior_of(3)));

  CHECK(tuple.defects().commutation_defect < 1e-15);
  CHECK(std::abs(tuple.defects().double_commutation_defect - 1.0) < 1e-12);
  CHECK(tuple.defects().max_interior_isometry() < 1e-15);

  const GateResult strict = check_gate(tuple, cfg);
  CHECK_FALSE(strict.pass);
  CHECK(strict.reason.find("double commutation") != std::string::npos);

  const GateResult loose = check_gate(tuple, cfg, GatePolicy::CommutingOnly);
  CHECK(loose.pass);

  CHECK_THROWS_AS(require_gate(tuple, cfg), GateError);
  try {
    require_gate(tuple, cfg);
  } catch (const GateError& e) {
    CHECK(std::abs(e.defects().at("double_commutation") - 1.0) < 1e-12);
  }
}

TEST_CASE("tuple construction guards its inputs") {
  CHECK_THROWS_AS(IsometryTuple(std::vector<Operator>{}), InputError);
  CHECK_THROWS_AS(IsometryTuple({j_op(3), j_op(2)}), InputError);
  ComplexMatrix half = 0.5 * ComplexMatrix::Identity(3, 3);
  CHECK_THROWS_AS(IsometryTuple({j_op(3)}, Operator(half)), InputError);

  const IsometryTuple tuple({j_op(3)});
  CHECK(tuple.size() == 1);
  CHECK(tuple.dim() == 3);
  CHECK_FALSE(tuple.has_explicit_interior());
  CHECK(spectral_norm(tuple.interior_projector().mat() -
                      ComplexMatrix::Identity(3, 3)) == 0.0);
  CHECK_THROWS_AS(tuple.op(0), InputError);
  CHECK_THROWS_AS(tuple.op(2), InputError);
}

TEST_CASE("restriction compresses on invariant subspaces only") {
  const Operator j3 = j_op(3);
  ComplexMatrix q(3, 2);
  q.setZero();
  q(1, 0) = 1.0;
  q(2, 1) = 1.0;
  const Subspace tail = Subspace::from_frame(q);

  // J3 maps span{e1,e2} into itself and compresses to J2.
  const Operator restricted = restrict_to(j3, tail, cfg);
  CHECK(spectral_norm(restricted.mat() - truncated_shift(2)) < 1e-15);

  ComplexMatrix head = ComplexMatrix::Zero(3, 1);
  head(0, 0) = 1.0;
  CHECK_THROWS_AS(restrict_to(j3, Subspace::from_frame(head), cfg),
                  DomainError);
}

TEST_CASE("reducing defect separates invariant from reducing") {
  const Operator j3 = j_op(3);
  ComplexMatrix q(3, 2);
  q.setZero();
  q(0, 0) = 1.0;
  q(1, 1) = 1.0;
  // span{e0,e1} is neither invariant (J e1 = e2) nor co-invariant.
  CHECK(reducing_defect(j3, Subspace::from_frame(q)) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // On a block-diagonal operator the summand genuinely reduces.
  ComplexMatrix block = ComplexMatrix::Zero(5, 5);
  block.block(0, 0, 3, 3) = truncated_shift(3);
  block.block(3, 3, 2, 2) = circular_shift(2);
  ComplexMatrix first3 = ComplexMatrix::Identity(5, 5).leftCols(3);
  CHECK(reducing_defect(Operator(block), Subspace::from_frame(first3)) <
        1e-15);
  CHECK(reducing_defect(j3, Subspace::zero(3)) == 0.0);
  CHECK(reducing_defect(j3, Subspace::full(3)) == 0.0);
}

TEST_CASE("operator-typed kernel and range wrappers") {
  const Operator j3 = j_op(3);
  CHECK(kernel(j3.adjoint(), cfg).dim() == 1);
  CHECK(range(j3, cfg).dim() == 2);
}
