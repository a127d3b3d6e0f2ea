#include "woldkit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "woldkit/equivalence.hpp"
#include "woldkit/fixtures.hpp"
#include "woldkit/manifest.hpp"
#include "woldkit/multiwold.hpp"
#include "woldkit/operators.hpp"
#include "woldkit/report.hpp"
#include "woldkit/wold.hpp"

namespace woldkit::cli {

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

ToleranceConfig resolve_config(const std::optional<ToleranceConfig>& stored,
                               const GlobalOptions& g, Index ambient_dim) {
  ToleranceConfig cfg = stored.value_or(ToleranceConfig{});
  // Without any stored or requested budget, scale with the space so deep
  // truncations on large manifests still terminate naturally.
  if (!stored && !g.max_power)
    cfg.max_power = std::max<int>(
        64, static_cast<int>(4 * std::min<Index>(ambient_dim, 1024)));
  if (g.rank_tol) cfg.rank_tol = *g.rank_tol;
  if (g.residual_tol) cfg.residual_tol = *g.residual_tol;
  if (g.max_power) cfg.max_power = *g.max_power;
  cfg.validate();
  return cfg;
}

void emit(Report& report, const GlobalOptions& g, const Timer& timer) {
  report.timing_ms = timer.ms();
  std::cout << report.to_text();
  if (!g.json_path.empty())
    atomic_write_text(g.json_path, report.to_json_text());
}

int exit_for_status(const std::string& status) {
  if (status == "accepted") return kExitAccepted;
  if (status == "unresolved") return kExitUnresolved;
  return kExitRejected;
}

char class_letter(Classification c) {
  switch (c) {
    case Classification::Shift:
      return 's';
    case Classification::Unitary:
      return 'u';
    case Classification::Mixed:
      return 'm';
  }
  return '?';
}

std::string classes_string(const std::vector<Classification>& cs) {
  std::string out;
  for (Classification c : cs) out.push_back(class_letter(c));
  return out;
}

std::string expected_classes(const SubsetLabel& label) {
  std::string out;
  for (int i = 1; i <= label.m(); ++i)
    out.push_back(label.contains(i) ? 's' : 'u');
  return out;
}

// Expected dimension of block A of the depth-m decomposition from a full
// 2^n oracle: sum the full labels whose restriction to {1..m} equals A.
Index marginal_oracle_dim(const OracleFile& oracle, int m,
                          std::uint32_t mask) {
  const std::uint32_t low = (1u << m) - 1u;
  Index total = 0;
  for (std::uint32_t full = 0; full < oracle.block_dims.size(); ++full)
    if ((full & low) == mask) total += oracle.block_dims[full];
  return total;
}

OracleFile load_checked_oracle(const GlobalOptions& g, int n,
                               Index ambient_dim) {
  OracleFile oracle = load_oracle(g.oracle_path);
  if (oracle.n != n)
    throw InputError("oracle: tuple size does not match the manifest");
  if (oracle.ambient_dim != ambient_dim)
    throw InputError("oracle: ambient dimension does not match the manifest");
  return oracle;
}

// Maps every library error to the documented exit code; commands below
// only build reports.
int run_mapped(const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const CapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRejected;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_check(const std::string& manifest_path, const GlobalOptions& g) {
  return run_mapped([&] {
    Timer timer;
    const TupleManifest manifest = load_manifest(manifest_path);
    const IsometryTuple tuple = to_tuple(manifest);
    const ToleranceConfig cfg =
        resolve_config(manifest.tolerances, g, manifest.ambient_dim);
    const GateResult gate = check_gate(tuple, cfg);

    Report report;
    report.command = "check";
    report.input = manifest_path;
    report.n = tuple.size();
    report.ambient_dim = tuple.dim();
    report.defects = gate.defects.as_map();
    report.status = gate.pass ? "accepted" : "rejected";
    report.gate_reason = gate.reason;
    emit(report, g, timer);
    return exit_for_status(report.status);
  });
}

namespace {

void fill_single_rows(Report& report, const WoldDecomposition& wd) {
  BlockRow shift_row{"{1}", wd.shift_part.dim(), "s", 0.0, 0.0, std::nullopt};
  BlockRow unitary_row{"{}", wd.unitary_part.dim(), "u", 0.0, 0.0,
                       std::nullopt};
  shift_row.joint_reducing = wd.residuals.shift_reducing;
  unitary_row.joint_reducing = wd.residuals.unitary_reducing;
  shift_row.span_orthogonality = wd.residuals.exhaustion;
  report.blocks = {shift_row, unitary_row};
  report.residuals = wd.residuals.as_map();
  report.notes.emplace_back("classification",
                            to_string(wd.classification));
  report.notes.emplace_back("multiplicity",
                            std::to_string(wd.multiplicity));
}

void fill_block_rows(Report& report, const MultiWoldDecomposition& d) {
  for (const BlockResult& b : d.blocks) {
    BlockRow row;
    row.subset = b.label.to_string();
    row.dim = b.space.dim();
    row.classes = b.space.dim() == 0 ? expected_classes(b.label)
                                     : classes_string(b.coordinate_class);
    row.joint_reducing = b.joint_reducing;
    row.span_orthogonality = b.span_orthogonality;
    report.blocks.push_back(std::move(row));
  }
  report.residuals["pairwise_orthogonality"] = d.pairwise_orthogonality;
  report.residuals["completeness_gap"] =
      static_cast<double>(d.completeness_gap);
  report.residuals["max_joint_reducing"] = d.max_joint_reducing;
  report.residuals["wandering_consistency"] = d.wandering_consistency;
  report.residuals["classification"] = d.max_classification_defect;
}

}  // namespace

int cmd_decompose(const std::string& manifest_path,
                  const DecomposeOptions& opt, const GlobalOptions& g) {
  return run_mapped([&] {
    Timer timer;
    const TupleManifest manifest = load_manifest(manifest_path);
    const IsometryTuple tuple = to_tuple(manifest);
    const ToleranceConfig cfg =
        resolve_config(manifest.tolerances, g, manifest.ambient_dim);
    const int n = tuple.size();
    const int depth = opt.depth == 0 ? n : opt.depth;
    if (depth < 1 || depth > n) {
      std::ostringstream os;
      os << "decompose: depth " << depth << " out of range 1.." << n;
      throw InputError(os.str());
    }
    if (opt.method != "direct" && opt.method != "recursive" &&
        opt.method != "both")
      throw InputError("decompose: method must be direct, recursive or both");

    std::optional<OracleFile> oracle;
    if (!g.oracle_path.empty())
      oracle = load_checked_oracle(g, n, tuple.dim());

    Report report;
    report.command = "decompose";
    report.input = manifest_path;
    report.method = depth == 1 ? "classical" : opt.method;
    report.n = n;
    report.depth = depth;
    report.ambient_dim = tuple.dim();
    report.defects = tuple.defects().as_map();
    report.status = "accepted";

    try {
      if (depth == 1) {
        require_gate(tuple, cfg, GatePolicy::CommutingOnly);
        const WoldDecomposition wd = wold_decompose(tuple.op(1), cfg);
        fill_single_rows(report, wd);
        if (wd.resolution != Resolution::Stabilized)
          report.status = "unresolved";
      } else {
        std::optional<MultiWoldDecomposition> direct, recursive;
        if (opt.method != "recursive")
          direct = decompose_direct(tuple, depth, cfg);
        if (opt.method != "direct")
          recursive = decompose_recursive(tuple, depth, cfg);
        const MultiWoldDecomposition& primary =
            direct ? *direct : *recursive;
        fill_block_rows(report, primary);
        if (primary.resolution != Resolution::Stabilized)
          report.status = "unresolved";
        if (direct && recursive) {
          if (recursive->resolution != Resolution::Stabilized)
            report.status = "unresolved";
          double worst_angle = 0.0;
          bool dims_match = true;
          for (const SubsetLabel& label : SubsetLabel::all(depth)) {
            AgreementRow row;
            row.subset = label.to_string();
            row.direct_dim = direct->block(label).space.dim();
            row.recursive_dim = recursive->block(label).space.dim();
            if (row.direct_dim != row.recursive_dim) {
              dims_match = false;
              row.angle = std::asin(1.0);
            } else if (row.direct_dim > 0) {
              row.angle = max_principal_angle(
                  direct->block(label).space, recursive->block(label).space);
            }
            worst_angle = std::max(worst_angle, row.angle);
            report.agreement.push_back(std::move(row));
          }
          report.residuals["method_agreement"] = worst_angle;
          if (report.status == "accepted" &&
              (!dims_match || worst_angle > cfg.residual_tol)) {
            report.status = "rejected";
            report.notes.emplace_back("failure",
                                      "direct and recursive methods disagree");
          }
        }
      }
    } catch (const GateError& e) {
      report.status = "rejected";
      report.gate_reason = e.what();
      emit(report, g, timer);
      return kExitRejected;
    } catch (const DecompositionError& e) {
      report.status = "rejected";
      for (const auto& [name, value] : e.residuals())
        report.residuals[name] = value;
      report.notes.emplace_back("failure", e.what());
      emit(report, g, timer);
      return kExitRejected;
    } catch (const DomainError& e) {
      report.status = "rejected";
      report.notes.emplace_back("failure", e.what());
      emit(report, g, timer);
      return kExitRejected;
    } catch (const ConsistencyError& e) {
      report.status = "rejected";
      report.notes.emplace_back("failure", e.what());
      emit(report, g, timer);
      return kExitRejected;
    }

    if (oracle) {
      bool mismatch = false;
      for (BlockRow& row : report.blocks) {
        // Rows are in mask order for depth >= 2; the classical layout maps
        // {1} and {} onto masks 1 and 0.
        std::uint32_t mask = 0;
        if (depth == 1) {
          mask = row.subset == "{1}" ? 1u : 0u;
        } else {
          mask = static_cast<std::uint32_t>(&row - report.blocks.data());
        }
        row.expected_dim = marginal_oracle_dim(*oracle, depth, mask);
        if (*row.expected_dim != row.dim) mismatch = true;
      }
      if (mismatch && report.status == "accepted") {
        report.status = "rejected";
        report.notes.emplace_back("failure",
                                  "block dimensions disagree with the oracle");
      }
    }

    emit(report, g, timer);
    return exit_for_status(report.status);
  });
}

namespace {

FixtureSpec preset_spec(const std::string& name) {
  if (name == "polydisc") {
    FixtureSpec spec;
    spec.name = "polydisc";
    spec.n = 2;
    BlockRecipe block;
    block.atoms = {ShiftAtom{3}, ShiftAtom{3}};
    spec.blocks = {block};
    return spec;
  }
  if (name == "polydisc3") {
    FixtureSpec spec;
    spec.name = "polydisc3";
    spec.n = 3;
    BlockRecipe block;
    block.atoms = {ShiftAtom{2}, ShiftAtom{2}, ShiftAtom{2}};
    spec.blocks = {block};
    return spec;
  }
  for (const FixtureSpec& spec : standard_grid())
    if (spec.name == name) return spec;
  // Friendly aliases for the most commonly wanted shapes.
  if (name == "shift-unitary") return preset_spec("pair-su");
  if (name == "pair-mixed") return preset_spec("pair-all-blocks");
  if (name == "three-mixed") return preset_spec("triple-su-mix");
  throw InputError("fixture: unknown preset '" + name +
                   "' (use --list to see the available names)");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names = {"polydisc", "polydisc3", "shift-unitary",
                                    "pair-mixed", "three-mixed"};
  for (const FixtureSpec& spec : standard_grid()) names.push_back(spec.name);
  return names;
}

}  // namespace

int cmd_fixture(const FixtureOptions& opt, const GlobalOptions& g) {
  return run_mapped([&] {
    Timer timer;
    if (opt.list) {
      for (const std::string& name : preset_names())
        std::cout << name << "\n";
      return kExitAccepted;
    }
    if (opt.preset.empty() == opt.spec_path.empty())
      throw InputError("fixture: give exactly one of --preset or --spec");
    if (opt.out_path.empty())
      throw InputError("fixture: --out is required");

    FixtureSpec spec = opt.preset.empty() ? load_fixture_spec(opt.spec_path)
                                          : preset_spec(opt.preset);
    if (g.seed) spec.scramble_seed = *g.seed;

    const Fixture fixture = build_fixture(spec);
    TupleManifest manifest = manifest_from(fixture.tuple);
    manifest.tolerances = spec.suggested_config();
    save_manifest(opt.out_path, manifest);
    if (!g.oracle_path.empty())
      save_oracle(g.oracle_path, oracle_from(fixture.oracle));

    Report report;
    report.command = "fixture";
    report.input = opt.preset.empty() ? opt.spec_path : opt.preset;
    report.status = "accepted";
    report.n = spec.n;
    report.ambient_dim = fixture.oracle.ambient_dim;
    for (const SubsetLabel& label : SubsetLabel::all(spec.n)) {
      BlockRow row;
      row.subset = label.to_string();
      row.dim = fixture.oracle.block_dim(label);
      row.classes = expected_classes(label);
      report.blocks.push_back(std::move(row));
    }
    report.notes.emplace_back("name", spec.name);
    report.notes.emplace_back("manifest", opt.out_path);
    if (!g.oracle_path.empty())
      report.notes.emplace_back("oracle", g.oracle_path);
    if (spec.scramble_seed)
      report.notes.emplace_back("scramble_seed",
                                std::to_string(*spec.scramble_seed));
    emit(report, g, timer);
    return kExitAccepted;
  });
}

namespace {

void run_wold_suite(const IsometryTuple& tuple, const ToleranceConfig& cfg,
                    Report& report) {
  for (int i = 1; i <= tuple.size(); ++i) {
    CheckRow row;
    std::ostringstream name;
    name << "classical decomposition, coordinate " << i;
    row.name = name.str();
    try {
      const WoldDecomposition wd = wold_decompose(tuple.op(i), cfg);
      row.value = wd.residuals.worst();
      row.pass = wd.resolution == Resolution::Stabilized;
      std::ostringstream note;
      note << to_string(wd.classification) << ", multiplicity "
           << wd.multiplicity;
      if (!row.pass) note << ", " << to_string(wd.resolution);
      row.note = note.str();
    } catch (const Error& e) {
      row.pass = false;
      row.note = e.what();
    }
    report.checks.push_back(std::move(row));
  }
}

void run_multi_suite(const IsometryTuple& tuple, const ToleranceConfig& cfg,
                     Report& report) {
  const int n = tuple.size();
  if (n < 2) {
    report.checks.push_back(
        {"block decomposition", true, 0.0, "skipped: single operator"});
    return;
  }
  std::optional<MultiWoldDecomposition> direct, recursive;
  {
    CheckRow row{"block decomposition (direct)", false, 0.0, ""};
    try {
      direct = decompose_direct(tuple, n, cfg);
      row.value = std::max({direct->pairwise_orthogonality,
                            direct->max_joint_reducing,
                            direct->wandering_consistency,
                            std::abs(static_cast<double>(
                                direct->completeness_gap))});
      row.pass = direct->resolution == Resolution::Stabilized;
      row.note = row.pass ? "" : to_string(direct->resolution);
    } catch (const Error& e) {
      row.note = e.what();
    }
    report.checks.push_back(std::move(row));
  }
  {
    CheckRow row{"block decomposition (recursive)", false, 0.0, ""};
    try {
      recursive = decompose_recursive(tuple, n, cfg);
      row.value = std::max(recursive->pairwise_orthogonality,
                           recursive->max_joint_reducing);
      row.pass = recursive->resolution == Resolution::Stabilized;
      row.note = row.pass ? "" : to_string(recursive->resolution);
    } catch (const Error& e) {
      row.note = e.what();
    }
    report.checks.push_back(std::move(row));
  }
  if (direct && recursive) {
    CheckRow row{"methods agree on every block", false, 0.0, ""};
    double worst = 0.0;
    bool match = true;
    for (const SubsetLabel& label : SubsetLabel::all(n)) {
      const Subspace& a = direct->block(label).space;
      const Subspace& b = recursive->block(label).space;
      if (a.dim() != b.dim()) {
        match = false;
        std::ostringstream note;
        note << "block " << label.to_string() << " has dimensions " << a.dim()
             << " vs " << b.dim();
        row.note = note.str();
        break;
      }
      if (a.dim() > 0) worst = std::max(worst, max_principal_angle(a, b));
    }
    row.value = worst;
    row.pass = match && worst <= cfg.residual_tol;
    report.checks.push_back(std::move(row));
  }
}

void run_identities_suite(const IsometryTuple& tuple,
                          const ToleranceConfig& cfg, Report& report) {
  const int n = tuple.size();
  if (n < 2) {
    report.checks.push_back(
        {"wandering identities", true, 0.0, "skipped: single operator"});
    return;
  }
  const std::uint32_t full = (1u << n) - 1u;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    const SubsetLabel a(n, mask);
    for (int j = 1; j <= n; ++j) {
      if (a.contains(j)) continue;
      CheckRow row;
      std::ostringstream name;
      name << "wandering identity A=" << a.to_string() << " j=" << j;
      row.name = name.str();
      try {
        const IdentityReport rep =
            generalized_wandering_identity(tuple, a, j, cfg);
        row.pass = rep.pass;
        row.value = rep.reducing_ok ? rep.angle : rep.reducing_defect;
        std::ostringstream note;
        if (!rep.reducing_ok)
          note << "reducing defect " << rep.reducing_defect;
        else
          note << "dims " << rep.lhs_dim << "/" << rep.rhs_dim;
        row.note = note.str();
      } catch (const Error& e) {
        row.pass = false;
        row.note = e.what();
      }
      report.checks.push_back(std::move(row));
    }
  }
}

void run_equivalence_suite(const IsometryTuple& tuple,
                           const ToleranceConfig& cfg, Report& report) {
  try {
    const EquivalenceReport rep = check_equivalence_conditions(tuple, cfg);
    const bool expect = rep.spanning_wandering.pass;
    for (const auto& [name, condition] : rep.items()) {
      CheckRow row;
      row.name = "condition: " + name;
      // Within this suite a condition "passes" when it agrees with the
      // others; the five are all supposed to be true or all false.
      row.pass = condition->pass == expect;
      row.value = condition->residual;
      std::ostringstream note;
      note << (condition->pass ? "holds" : "fails");
      if (!condition->note.empty()) note << "; " << condition->note;
      row.note = note.str();
      report.checks.push_back(std::move(row));
    }
    report.checks.push_back({"conditions agree with each other",
                             rep.consistent(), 0.0,
                             rep.all_pass() ? "joint shift model"
                                            : "not a joint shift"});
  } catch (const Error& e) {
    report.checks.push_back({"equivalence conditions", false, 0.0, e.what()});
  }
}

}  // namespace

int cmd_verify(const std::string& manifest_path, const std::string& suite,
               const GlobalOptions& g) {
  return run_mapped([&] {
    Timer timer;
    const TupleManifest manifest = load_manifest(manifest_path);
    const IsometryTuple tuple = to_tuple(manifest);
    const ToleranceConfig cfg =
        resolve_config(manifest.tolerances, g, manifest.ambient_dim);
    if (suite != "all" && suite != "wold" && suite != "multi" &&
        suite != "identities" && suite != "equivalence")
      throw InputError(
          "verify: suite must be wold, multi, identities, equivalence or all");

    Report report;
    report.command = "verify";
    report.input = manifest_path;
    report.method = suite;
    report.n = tuple.size();
    report.ambient_dim = tuple.dim();
    report.defects = tuple.defects().as_map();

    if (suite == "all" || suite == "wold")
      run_wold_suite(tuple, cfg, report);
    if (suite == "all" || suite == "multi")
      run_multi_suite(tuple, cfg, report);
    if (suite == "all" || suite == "identities")
      run_identities_suite(tuple, cfg, report);
    if (suite == "all" || suite == "equivalence")
      run_equivalence_suite(tuple, cfg, report);

    bool any_fail = false;
    bool any_unresolved = false;
    for (const CheckRow& row : report.checks) {
      // A row that only ran out of power budget is inconclusive, not failed.
      if (row.note.find("budget-exhausted") != std::string::npos)
        any_unresolved = true;
      else if (!row.pass)
        any_fail = true;
    }
    report.status =
        any_fail ? "rejected" : (any_unresolved ? "unresolved" : "accepted");
    emit(report, g, timer);
    return exit_for_status(report.status);
  });
}

}  // namespace woldkit::cli
