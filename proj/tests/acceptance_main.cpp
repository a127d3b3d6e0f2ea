// Acceptance harness: one line per criterion, nonzero exit when any fails.
// Every numeric threshold here is pinned; loosening one is a red flag.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "woldkit/equivalence.hpp"
#include "woldkit/fixtures.hpp"
#include "woldkit/manifest.hpp"
#include "woldkit/multiwold.hpp"
#include "woldkit/rng.hpp"
#include "woldkit/wold.hpp"

using namespace woldkit;
namespace fs = std::filesystem;

namespace {

constexpr double kResidualTol = 1e-8;
constexpr double kReducingTol = 1e-10;
constexpr double kGateDefectTol = 1e-12;

struct Outcome {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  template <typename T>
  void expect_eq(const T& got, const T& want, const std::string& what) {
    if (got != want) {
      std::ostringstream os;
      os << what << ": got " << got << ", want " << want;
      failures.push_back(os.str());
    }
  }
  void expect_le(double value, double bound, const std::string& what) {
    if (!(value <= bound)) {
      std::ostringstream os;
      os << what << ": " << value << " > " << bound;
      failures.push_back(os.str());
    }
  }
};

IsometryTuple conjugated(const IsometryTuple& t, const ComplexMatrix& q) {
  std::vector<Operator> ops;
  for (const Operator& v : t.ops())
    ops.emplace_back(q * v.mat() * q.adjoint());
  return IsometryTuple(std::move(ops),
                       Operator(q * t.interior_projector().mat() * q.adjoint()));
}

// ---------------------------------------------------------------------------
// 1. Single-operator suite over the scrambled J_D (+) U_u grid.

void criterion_single_wold(Outcome& out) {
  std::uint64_t seed = 1000;
  for (int d = 2; d <= 6; ++d) {
    for (int u = 0; u <= 4; ++u) {
      for (int kind = 0; kind < (u == 0 ? 1 : 2); ++kind) {
        const Index n = d + u;
        ComplexMatrix v = ComplexMatrix::Zero(n, n);
        v.topLeftCorner(d, d) = truncated_shift(d);
        if (u > 0)
          v.bottomRightCorner(u, u) =
              kind == 0 ? circular_shift(u) : seeded_unitary(u, ++seed);
        const ComplexMatrix q = seeded_unitary(n, ++seed);
        const Operator op(q * v * q.adjoint());

        std::ostringstream tag;
        tag << "D=" << d << " u=" << u << " kind=" << kind;
        const WoldDecomposition wd =
            wold_decompose(op, ToleranceConfig::for_depth(d));
        out.expect(wd.resolution == Resolution::Stabilized,
                   tag.str() + ": not stabilized");
        out.expect_eq(wd.shift_part.dim(), static_cast<Index>(d),
                      tag.str() + ": shift dim");
        out.expect_eq(wd.unitary_part.dim(), static_cast<Index>(u),
                      tag.str() + ": unitary dim");
        out.expect_eq(wd.multiplicity, static_cast<Index>(1),
                      tag.str() + ": multiplicity");
        out.expect_le(wd.residuals.worst(), kResidualTol,
                      tag.str() + ": residuals");
        const Classification want =
            u == 0 ? Classification::Shift : Classification::Mixed;
        out.expect(wd.classification == want, tag.str() + ": classification");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 2. Projection identities on every tensor fixture.

void criterion_projection_identities(Outcome& out) {
  for (const FixtureSpec& spec : standard_grid()) {
    const Fixture fx = build_fixture(spec);
    const ToleranceConfig cfg = spec.suggested_config();
    const std::uint32_t full = (1u << spec.n) - 1u;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      const SubsetLabel a(spec.n, mask);
      const std::string tag = spec.name + " A=" + a.to_string();
      const WanderingCheck check =
          wandering_intersection_checked(fx.tuple, a, cfg);
      out.expect_le(check.consistency_angle, kResidualTol,
                    tag + ": product-vs-intersection angle");
      for (int j = 1; j <= spec.n; ++j) {
        if (a.contains(j)) continue;
        const IdentityReport rep =
            generalized_wandering_identity(fx.tuple, a, j, cfg);
        std::ostringstream jt;
        jt << tag << " j=" << j;
        out.expect_le(rep.reducing_defect, kReducingTol,
                      jt.str() + ": reducing defect");
        out.expect(rep.reducing_ok, jt.str() + ": reducing precondition");
        out.expect(rep.pass, jt.str() + ": identity verdict");
        out.expect_le(rep.angle, kResidualTol, jt.str() + ": identity angle");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 3. Block decomposition reproduces every fixture oracle exactly.

void criterion_block_oracles(Outcome& out) {
  const std::vector<FixtureSpec> grid = standard_grid();
  out.expect(grid.size() >= 25, "fewer than 25 fixtures in the grid");

  std::set<std::uint32_t> masks2, masks3;
  for (const FixtureSpec& spec : grid) {
    const Fixture fx = build_fixture(spec);
    const ToleranceConfig cfg = spec.suggested_config();
    const MultiWoldDecomposition d = decompose_direct(fx.tuple, spec.n, cfg);

    out.expect_eq(d.completeness_gap, static_cast<Index>(0),
                  spec.name + ": completeness gap");
    out.expect_le(d.pairwise_orthogonality, kResidualTol,
                  spec.name + ": pairwise orthogonality");
    out.expect(d.resolution == Resolution::Stabilized,
               spec.name + ": not stabilized");
    for (const SubsetLabel& label : SubsetLabel::all(spec.n)) {
      const BlockResult& b = d.block(label);
      out.expect_eq(b.space.dim(), fx.oracle.block_dim(label),
                    spec.name + " block " + label.to_string() + ": dim");
      for (int i = 1; i <= spec.n; ++i) {
        const Classification want = label.contains(i) ? Classification::Shift
                                                      : Classification::Unitary;
        out.expect(b.coordinate_class[static_cast<size_t>(i - 1)] == want,
                   spec.name + " block " + label.to_string() +
                       ": classification of coordinate " + std::to_string(i));
      }
    }
    for (const BlockRecipe& block : spec.blocks)
      (spec.n == 2 ? masks2 : masks3).insert(block.subset_mask());
  }
  out.expect(masks2.size() == 4 && masks3.size() == 8,
             "grid does not cover every subset pattern");
}

// ---------------------------------------------------------------------------
// 4. Direct and recursive methods agree block by block.

void criterion_method_agreement(Outcome& out) {
  for (const FixtureSpec& spec : standard_grid()) {
    const Fixture fx = build_fixture(spec);
    const ToleranceConfig cfg = spec.suggested_config();
    const MultiWoldDecomposition direct =
        decompose_direct(fx.tuple, spec.n, cfg);
    const MultiWoldDecomposition recursive =
        decompose_recursive(fx.tuple, spec.n, cfg);
    for (const SubsetLabel& label : SubsetLabel::all(spec.n)) {
      const Subspace& a = direct.block(label).space;
      const Subspace& b = recursive.block(label).space;
      const std::string tag = spec.name + " block " + label.to_string();
      out.expect_eq(b.dim(), a.dim(), tag + ": dims");
      if (a.dim() == b.dim() && a.dim() > 0)
        out.expect_le(max_principal_angle(a, b), kResidualTol,
                      tag + ": method angle");
    }
  }
}

// ---------------------------------------------------------------------------
// 5. Depth-2 blocks of every triple are the sums of their depth-3 blocks.

void criterion_partial_depth(Outcome& out) {
  for (const FixtureSpec& spec : standard_grid()) {
    if (spec.n != 3) continue;
    const Fixture fx = build_fixture(spec);
    const ToleranceConfig cfg = spec.suggested_config();
    const MultiWoldDecomposition deep = decompose_direct(fx.tuple, 3, cfg);
    const MultiWoldDecomposition shallow = decompose_direct(fx.tuple, 2, cfg);

    for (const SubsetLabel& label : SubsetLabel::all(2)) {
      const Subspace& block = shallow.block(label).space;
      const Subspace& plain = deep.block(SubsetLabel(3, label.mask())).space;
      const Subspace& raised =
          deep.block(SubsetLabel(3, label.mask() | 4u)).space;
      const std::string tag = spec.name + " block " + label.to_string();
      out.expect_eq(block.dim(), plain.dim() + raised.dim(), tag + ": dim sum");
      // Equal dimension plus containment of both summands gives equality.
      if (plain.dim() > 0)
        out.expect_le(containment_angle(plain, block), kResidualTol,
                      tag + ": third-coordinate-shift summand");
      if (raised.dim() > 0)
        out.expect_le(containment_angle(raised, block), kResidualTol,
                      tag + ": third-coordinate-unitary summand");
    }
  }
}

// ---------------------------------------------------------------------------
// 6. The named four-corner split on a (4,2,2,1) pair fixture.

void criterion_pair_corners(Outcome& out) {
  FixtureSpec spec;
  spec.name = "corners";
  spec.n = 2;
  BlockRecipe ss, su, us, uu;
  ss.atoms = {ShiftAtom{2}, ShiftAtom{2}};
  su.atoms = {ShiftAtom{2}, UnitaryAtom{1, UnitaryKind::Circular}};
  us.atoms = {UnitaryAtom{1, UnitaryKind::Circular}, ShiftAtom{2}};
  uu.atoms = {UnitaryAtom{1, UnitaryKind::Circular},
              UnitaryAtom{1, UnitaryKind::Circular}};
  spec.blocks = {ss, su, us, uu};

  const Fixture fx = build_fixture(spec);
  out.expect_eq(fx.oracle.ambient_dim, static_cast<Index>(9),
                "corner fixture size");
  const PairBlocks blocks = pair_blocks(fx.tuple, spec.suggested_config());
  out.expect_eq(blocks.ss.dim(), static_cast<Index>(4), "ss dim");
  out.expect_eq(blocks.su.dim(), static_cast<Index>(2), "su dim");
  out.expect_eq(blocks.us.dim(), static_cast<Index>(2), "us dim");
  out.expect_eq(blocks.uu.dim(), static_cast<Index>(1), "uu dim");
  out.expect_eq(blocks.full.completeness_gap, static_cast<Index>(0),
                "completeness gap");
}

// ---------------------------------------------------------------------------
// 7. Joint-shift characterization on polydisc models, and its consistent
//    failure on fixtures with a unitary coordinate.

bool has_unitary_coordinate(const FixtureSpec& spec) {
  for (int s = 0; s < spec.n; ++s) {
    bool all_unitary = true;
    for (const BlockRecipe& block : spec.blocks)
      if (std::holds_alternative<ShiftAtom>(block.atoms[static_cast<size_t>(s)]))
        all_unitary = false;
    if (all_unitary) return true;
  }
  return false;
}

void criterion_joint_shift(Outcome& out) {
  for (int e : {1, 2}) {
    for (int depth : {2, 3}) {
      for (int n : {2, 3}) {
        std::ostringstream tag;
        tag << "polydisc e=" << e << " D=" << depth << " n=" << n;
        const PolydiscModel model(e, depth, n);
        const ToleranceConfig cfg = ToleranceConfig::for_depth(depth);
        out.expect_eq(joint_wandering(model.tuple(), cfg).dim(),
                      static_cast<Index>(e), tag.str() + ": joint dim");
        const EquivalenceReport rep =
            check_equivalence_conditions(model.tuple(), cfg);
        out.expect(rep.all_pass(), tag.str() + ": conditions");
        out.expect(rep.consistent(), tag.str() + ": consistency");
        const ModelEquivalence eq = build_model_equivalence(model.tuple(), cfg);
        out.expect_le(eq.interior_residual, kResidualTol,
                      tag.str() + ": intertwining residual");
        out.expect_le(eq.unitarity_defect, kResidualTol,
                      tag.str() + ": unitarity defect");
        out.expect_eq(eq.coefficient_dim, e, tag.str() + ": coefficient dim");
        out.expect(eq.depths == std::vector<int>(static_cast<size_t>(n), depth),
                   tag.str() + ": depths");
      }
    }
  }

  int negatives = 0;
  for (const FixtureSpec& spec : standard_grid()) {
    if (!has_unitary_coordinate(spec)) continue;
    ++negatives;
    const Fixture fx = build_fixture(spec);
    const EquivalenceReport rep =
        check_equivalence_conditions(fx.tuple, spec.suggested_config());
    out.expect(!rep.all_pass(), spec.name + ": conditions wrongly pass");
    out.expect(rep.consistent(), spec.name + ": conditions disagree");
  }
  out.expect(negatives >= 4, "too few unitary-coordinate fixtures exercised");
}

// ---------------------------------------------------------------------------
// 8. The merely commuting pair is rejected, never decomposed.

void criterion_negative_gate(Outcome& out) {
  ComplexMatrix p = ComplexMatrix::Identity(3, 3);
  p(2, 2) = 0.0;
  const Operator j(truncated_shift(3));
  const IsometryTuple t({j, j}, Operator(p));
  const ToleranceConfig cfg{};

  const GateResult gate = check_gate(t, cfg);
  out.expect(!gate.pass, "gate wrongly accepts the pair");
  out.expect_le(std::abs(gate.defects.double_commutation_defect - 1.0),
                kGateDefectTol, "double commutation defect is not 1");

  bool direct_blocked = false, recursive_blocked = false;
  try {
    decompose_direct(t, 2, cfg);
  } catch (const GateError&) {
    direct_blocked = true;
  }
  try {
    decompose_recursive(t, 2, cfg);
  } catch (const GateError&) {
    recursive_blocked = true;
  }
  out.expect(direct_blocked, "direct method decomposed the pair");
  out.expect(recursive_blocked, "recursive method decomposed the pair");
}

// ---------------------------------------------------------------------------
// 9. Everything is equivariant under a fresh conjugation.

void criterion_equivariance(Outcome& out) {
  std::uint64_t seed = 777000;
  for (const FixtureSpec& spec : standard_grid()) {
    const Fixture fx = build_fixture(spec);
    const ToleranceConfig cfg = spec.suggested_config();
    const ComplexMatrix q = seeded_unitary(fx.tuple.dim(), ++seed);
    const IsometryTuple moved = conjugated(fx.tuple, q);

    const MultiWoldDecomposition base =
        decompose_direct(fx.tuple, spec.n, cfg);
    const MultiWoldDecomposition after = decompose_direct(moved, spec.n, cfg);
    for (const SubsetLabel& label : SubsetLabel::all(spec.n)) {
      const Subspace& b = base.block(label).space;
      const Subspace& a = after.block(label).space;
      const std::string tag = spec.name + " block " + label.to_string();
      out.expect_eq(a.dim(), b.dim(), tag + ": dim moved");
      if (a.dim() == b.dim() && a.dim() > 0) {
        const Subspace mapped = Subspace::from_frame(q * b.frame());
        out.expect_le(max_principal_angle(a, mapped), kResidualTol,
                      tag + ": conjugated block angle");
      }
    }
  }

  // The single-operator and joint-shift suites re-pass after conjugation.
  {
    const Index n = 7;
    ComplexMatrix v = ComplexMatrix::Zero(n, n);
    v.topLeftCorner(4, 4) = truncated_shift(4);
    v.bottomRightCorner(3, 3) = circular_shift(3);
    const ComplexMatrix q = seeded_unitary(n, ++seed);
    const WoldDecomposition wd = wold_decompose(
        Operator(q * v * q.adjoint()), ToleranceConfig::for_depth(4));
    out.expect_eq(wd.shift_part.dim(), static_cast<Index>(4),
                  "conjugated single-operator shift dim");
    out.expect_eq(wd.unitary_part.dim(), static_cast<Index>(3),
                  "conjugated single-operator unitary dim");
    out.expect_le(wd.residuals.worst(), kResidualTol,
                  "conjugated single-operator residuals");
  }
  {
    const PolydiscModel model(2, 2, 2);
    const ComplexMatrix q = seeded_unitary(model.dim(), ++seed);
    const ToleranceConfig cfg = ToleranceConfig::for_depth(2);
    const EquivalenceReport rep =
        check_equivalence_conditions(conjugated(model.tuple(), q), cfg);
    out.expect(rep.all_pass(), "conjugated polydisc conditions");
    out.expect(rep.consistent(), "conjugated polydisc consistency");
  }
}

// ---------------------------------------------------------------------------
// 10. CLI pipeline: fixture -> decompose -> JSON, byte-deterministic, with
//     every computed block matching the oracle dimension.

int run_cli(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd \"" + cwd.string() + "\" && \"" WOLDKIT_CLI_PATH
                          "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1 || !WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_cli_roundtrip(Outcome& out) {
  const fs::path dir =
      fs::temp_directory_path() /
      ("woldkit-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  // Identical relative paths in separate directories, so the only bytes
  // that could differ between the runs are computed ones.
  auto pipeline = [&](const std::string& stem) {
    const fs::path sub = dir / stem;
    fs::create_directories(sub);
    out.expect_eq(run_cli(sub, "fixture --preset pair-all-blocks --seed 555 "
                               "--out m.json --oracle o.json"),
                  0, stem + ": fixture exit code");
    out.expect_eq(run_cli(sub, "decompose m.json --method both "
                               "--oracle o.json --json r.json"),
                  0, stem + ": decompose exit code");
    return std::make_pair(slurp(sub / "m.json") + "\x1e" + slurp(sub / "o.json"),
                          slurp(sub / "r.json"));
  };

  const auto [inputs1, report1] = pipeline("first");
  const auto [inputs2, report2] = pipeline("second");
  out.expect(!report1.empty(), "empty decompose report");
  out.expect(inputs1 == inputs2, "fixture/oracle files differ across runs");
  out.expect(report1 == report2, "decompose reports differ across runs");

  if (!report1.empty()) {
    const nlohmann::json j = nlohmann::json::parse(report1);
    out.expect(j["status"] == "accepted", "CLI run not accepted");
    int rows = 0;
    for (const auto& row : j["blocks"]) {
      ++rows;
      out.expect(row.contains("expected_dim"), "missing oracle column");
      if (row.contains("expected_dim"))
        out.expect(row["dim"] == row["expected_dim"],
                   "computed block dimension deviates from the oracle");
    }
    out.expect_eq(rows, 4, "block row count");
  }

  std::error_code ec;
  fs::remove_all(dir, ec);
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "single-operator decomposition over the scrambled shift+unitary grid",
       criterion_single_wold},
      {2, "wandering projection identities on every tensor fixture",
       criterion_projection_identities},
      {3, "block decomposition matches every fixture oracle exactly",
       criterion_block_oracles},
      {4, "direct and recursive methods agree on every block",
       criterion_method_agreement},
      {5, "depth-2 blocks are sums of the matching depth-3 blocks",
       criterion_partial_depth},
      {6, "four-corner split of the (4,2,2,1) pair fixture",
       criterion_pair_corners},
      {7, "joint-shift conditions: pass on polydisc models, fail consistently "
          "with a unitary coordinate",
       criterion_joint_shift},
      {8, "merely commuting pair rejected with unit defect, never decomposed",
       criterion_negative_gate},
      {9, "equivariance under fresh conjugation with mapped blocks",
       criterion_equivariance},
      {10, "CLI fixture->decompose->JSON round trip is byte-deterministic",
       criterion_cli_roundtrip},
  };

  int failed = 0;
  for (const Criterion& criterion : criteria) {
    Outcome out;
    try {
      criterion.run(out);
    } catch (const std::exception& e) {
      out.failures.push_back(std::string("exception: ") + e.what());
    }
    if (out.failures.empty()) {
      std::printf("PASS  criterion %2d: %s\n", criterion.id, criterion.name);
    } else {
      ++failed;
      std::printf("FAIL  criterion %2d: %s\n", criterion.id, criterion.name);
      for (const std::string& failure : out.failures)
        std::printf("      - %s\n", failure.c_str());
    }
  }
  if (failed == 0)
    std::printf("all %zu criteria passed\n", criteria.size());
  else
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
