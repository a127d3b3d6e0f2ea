#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "woldkit/equivalence.hpp"
#include "woldkit/fixtures.hpp"

using namespace woldkit;

namespace {

const ToleranceConfig cfg{};

IsometryTuple equal_shift_pair() {
  ComplexMatrix p = ComplexMatrix::Identity(3, 3);
  p(2, 2) = 0.0;
  const Operator j(truncated_shift(3));
  return IsometryTuple({j, j}, Operator(p));
}

FixtureSpec shift_unitary_spec() {
  FixtureSpec spec;
  spec.name = "shift-unitary";
  spec.n = 2;
  BlockRecipe block;
  block.atoms = {ShiftAtom{3}, UnitaryAtom{2, UnitaryKind::Circular}};
  spec.blocks = {block};
  return spec;
}

}  // namespace

TEST_CASE("joint wandering subspace of the polydisc model") {
  const PolydiscModel model(2, 2, 2);
  const Subspace w = joint_wandering(model.tuple(), cfg);
  CHECK(w.dim() == 2);  // one copy of the coefficient space
}

TEST_CASE("all five conditions hold on the polydisc model") {
  const PolydiscModel model(2, 2, 2);
  const EquivalenceReport rep =
      check_equivalence_conditions(model.tuple(), cfg);

  CHECK(rep.spanning_wandering.pass);
  CHECK(rep.coordinates_all_shift.pass);
  CHECK(rep.coordinate_wandering.pass);
  CHECK(rep.joint_wandering_spans.pass);
  CHECK(rep.model_equivalent.pass);
  CHECK(rep.all_pass());
  CHECK(rep.consistent());
  CHECK(rep.items().size() == 5);

  CHECK(rep.coordinates_all_shift.residual < 1e-10);
  CHECK(rep.joint_wandering_spans.residual < 1e-10);
  CHECK(rep.model_equivalent.residual < 1e-8);
}

TEST_CASE("a unitary coordinate fails every condition together") {
  const Fixture fx = build_fixture(shift_unitary_spec());
  const EquivalenceReport rep = check_equivalence_conditions(fx.tuple, cfg);

  CHECK_FALSE(rep.all_pass());
  CHECK(rep.consistent());
  CHECK_FALSE(rep.spanning_wandering.pass);
  CHECK_FALSE(rep.coordinates_all_shift.pass);
  CHECK_FALSE(rep.coordinate_wandering.pass);
  CHECK_FALSE(rep.joint_wandering_spans.pass);
  CHECK_FALSE(rep.model_equivalent.pass);
  CHECK(rep.coordinates_all_shift.note.find("coordinate 2 is") !=
        std::string::npos);
}

TEST_CASE("the merely commuting pair fails consistently too") {
  // V1 = V2 = J3 passes the commuting-only gate, so the report itself must
  // carry the refusal: both coordinates are shifts, yet nothing else holds.
  const IsometryTuple t = equal_shift_pair();
  const GateResult gate = check_gate(t, cfg, GatePolicy::CommutingOnly);
  REQUIRE(gate.pass);

  const EquivalenceReport rep = check_equivalence_conditions(t, cfg);
  CHECK_FALSE(rep.coordinates_all_shift.pass);  // double commutation defect 1
  CHECK(rep.coordinates_all_shift.residual == doctest::Approx(1.0));
  CHECK_FALSE(rep.spanning_wandering.pass);
  CHECK_FALSE(rep.coordinate_wandering.pass);
  CHECK_FALSE(rep.joint_wandering_spans.pass);
  CHECK_FALSE(rep.model_equivalent.pass);
  CHECK(rep.consistent());
}

TEST_CASE("model equivalence recovers the planted truncation box") {
  FixtureSpec spec;
  spec.name = "two-shift";
  spec.n = 2;
  BlockRecipe block;
  block.atoms = {ShiftAtom{3}, ShiftAtom{2}};
  spec.blocks = {block};

  for (bool scrambled : {false, true}) {
    FixtureSpec variant = spec;
    if (scrambled) variant.scramble_seed = 2024;
    const Fixture fx = build_fixture(variant);
    const ModelEquivalence eq = build_model_equivalence(fx.tuple, cfg);

    CHECK(eq.coefficient_dim == 1);
    CHECK(eq.depths == std::vector<int>{3, 2});
    CHECK(eq.unitarity_defect < 1e-10);
    CHECK(eq.interior_residual < 1e-10);
    CHECK(eq.model.dim() == 6);

    // The intertwiner actually carries V_i to the model coordinate on the
    // interior columns: U V_i u = M_i U u for u below the top grade.
    const ComplexMatrix& u = eq.intertwiner.mat();
    const ComplexMatrix lhs = u * fx.tuple.op(1).mat();
    const ComplexMatrix rhs = eq.model.op(1).mat() * u;
    const ComplexMatrix interior = fx.tuple.interior_projector().mat();
    CHECK(spectral_norm((lhs - rhs) * interior) < 1e-10);
  }
}

TEST_CASE("model equivalence refuses degenerate inputs") {
  // Zero joint wandering subspace: nothing to build the model from.
  const Fixture su = build_fixture(shift_unitary_spec());
  CHECK_THROWS_AS(build_model_equivalence(su.tuple, cfg), DomainError);

  // The merely commuting pair overcounts the lattice: 6 nodes in a
  // 3-dimensional space, caught by the coverage check.
  CHECK_THROWS_AS(build_model_equivalence(equal_shift_pair(), cfg),
                  DomainError);
}
