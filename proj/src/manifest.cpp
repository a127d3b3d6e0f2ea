#include "woldkit/manifest.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "woldkit/matrix_market.hpp"

namespace woldkit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw InputError("manifest: " + what);
}

json parse_file(const std::filesystem::path& path, const char* kind) {
  std::ifstream in(path);
  if (!in)
    throw InputError(std::string(kind) + ": cannot open '" + path.string() +
                     "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw InputError(std::string(kind) + ": '" + path.string() +
                     "' is not valid JSON");
  return j;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const char* where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key))
      fail(std::string("unknown key '") + key + "' in " + where);
}

json complex_to_json(const Complex& z) {
  return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail("complex entries must be [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty())
    fail("inline matrix must be a nonempty array of rows");
  const Index r = static_cast<Index>(rows.size());
  if (!rows[0].is_array()) fail("inline matrix rows must be arrays");
  const Index c = static_cast<Index>(rows[0].size());
  ComplexMatrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c)
      fail("inline matrix rows have inconsistent lengths");
    for (Index j = 0; j < c; ++j)
      m(i, j) = complex_from_json(row[static_cast<size_t>(j)]);
  }
  if (!m.allFinite()) fail("matrix has non-finite entries");
  return m;
}

ComplexMatrix matrix_from_source(const json& source,
                                 const std::filesystem::path& base) {
  if (!source.is_object()) fail("operator entries must be objects");
  reject_unknown_keys(source, {"inline", "file"}, "an operator entry");
  const bool has_inline = source.contains("inline");
  const bool has_file = source.contains("file");
  if (has_inline == has_file)
    fail("operator entries need exactly one of 'inline' or 'file'");
  if (has_inline) return matrix_from_json(source["inline"]);
  if (!source["file"].is_string()) fail("'file' must be a path string");
  const std::filesystem::path ref = source["file"].get<std::string>();
  return read_matrix_market(ref.is_absolute() ? ref : base / ref);
}

ToleranceConfig tolerances_from_json(const json& j) {
  if (!j.is_object()) fail("'tolerances' must be an object");
  reject_unknown_keys(
      j, {"rank_tol", "residual_tol", "stabilization_window", "max_power"},
      "'tolerances'");
  ToleranceConfig cfg;
  if (j.contains("rank_tol")) cfg.rank_tol = j["rank_tol"].get<double>();
  if (j.contains("residual_tol"))
    cfg.residual_tol = j["residual_tol"].get<double>();
  if (j.contains("stabilization_window"))
    cfg.stabilization_window = j["stabilization_window"].get<int>();
  if (j.contains("max_power")) cfg.max_power = j["max_power"].get<int>();
  cfg.validate();
  return cfg;
}

json tolerances_to_json(const ToleranceConfig& cfg) {
  return json{{"rank_tol", cfg.rank_tol},
              {"residual_tol", cfg.residual_tol},
              {"stabilization_window", cfg.stabilization_window},
              {"max_power", cfg.max_power}};
}

// Turns nlohmann type/lookup exceptions into InputError so malformed files
// map to the parse-error exit code instead of "internal error".
template <typename F>
auto guard_json(const char* kind, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw InputError(std::string(kind) + ": " + e.what());
  }
}

}  // namespace

TupleManifest load_manifest(const std::filesystem::path& path) {
  const json j = parse_file(path, "manifest");
  return guard_json("manifest", [&] {
  if (!j.is_object()) fail("top level must be an object");
  reject_unknown_keys(j,
                      {"schema_version", "ambient_dim", "operators",
                       "interior_projector", "tolerances"},
                      "the manifest");
  TupleManifest m;
  if (!j.contains("schema_version") || !j["schema_version"].is_string())
    fail("missing schema_version");
  m.schema_version = j["schema_version"].get<std::string>();
  if (m.schema_version != "woldkit/1")
    fail("unsupported schema_version '" + m.schema_version + "'");
  if (!j.contains("ambient_dim") || !j["ambient_dim"].is_number_integer())
    fail("missing integer ambient_dim");
  m.ambient_dim = j["ambient_dim"].get<Index>();
  if (m.ambient_dim < 1) fail("ambient_dim must be positive");
  if (!j.contains("operators") || !j["operators"].is_array() ||
      j["operators"].empty())
    fail("'operators' must be a nonempty array");

  const std::filesystem::path base = path.parent_path();
  for (const json& source : j["operators"]) {
    ComplexMatrix op = matrix_from_source(source, base);
    if (op.rows() != m.ambient_dim || op.cols() != m.ambient_dim) {
      std::ostringstream os;
      os << "operator is " << op.rows() << "x" << op.cols()
         << " but ambient_dim is " << m.ambient_dim;
      fail(os.str());
    }
    m.operators.push_back(std::move(op));
  }
  if (j.contains("interior_projector")) {
    ComplexMatrix p = matrix_from_source(j["interior_projector"], base);
    if (p.rows() != m.ambient_dim || p.cols() != m.ambient_dim)
      fail("interior projector dimension mismatch");
    m.interior_projector = std::move(p);
  }
  if (j.contains("tolerances"))
    m.tolerances = tolerances_from_json(j["tolerances"]);
  return m;
  });
}

void save_manifest(const std::filesystem::path& path, const TupleManifest& m) {
  json j;
  j["schema_version"] = m.schema_version;
  j["ambient_dim"] = m.ambient_dim;
  json ops = json::array();
  for (const ComplexMatrix& op : m.operators)
    ops.push_back(json{{"inline", matrix_to_json(op)}});
  j["operators"] = std::move(ops);
  if (m.interior_projector)
    j["interior_projector"] = json{{"inline",
                                    matrix_to_json(*m.interior_projector)}};
  if (m.tolerances) j["tolerances"] = tolerances_to_json(*m.tolerances);
  atomic_write_text(path, j.dump(2) + "\n");
}

IsometryTuple to_tuple(const TupleManifest& m) {
  std::vector<Operator> ops;
  ops.reserve(m.operators.size());
  for (const ComplexMatrix& op : m.operators) ops.emplace_back(op);
  if (m.interior_projector)
    return IsometryTuple(std::move(ops), Operator(*m.interior_projector));
  return IsometryTuple(std::move(ops));
}

TupleManifest manifest_from(const IsometryTuple& tuple) {
  TupleManifest m;
  m.ambient_dim = tuple.dim();
  for (const Operator& op : tuple.ops()) m.operators.push_back(op.mat());
  if (tuple.has_explicit_interior())
    m.interior_projector = tuple.interior_projector().mat();
  return m;
}

OracleFile oracle_from(const FixtureOracle& oracle) {
  OracleFile file;
  file.n = oracle.n;
  file.ambient_dim = oracle.ambient_dim;
  file.block_dims = oracle.block_dims;
  file.joint_wandering_dim = oracle.joint_wandering_dim;
  return file;
}

OracleFile load_oracle(const std::filesystem::path& path) {
  const json j = parse_file(path, "oracle");
  return guard_json("oracle", [&] {
  if (!j.is_object()) fail("oracle top level must be an object");
  reject_unknown_keys(
      j, {"schema_version", "n", "ambient_dim", "blocks", "joint_wandering_dim"},
      "the oracle");
  if (!j.contains("schema_version") ||
      j["schema_version"].get<std::string>() != "woldkit-oracle/1")
    fail("oracle needs schema_version woldkit-oracle/1");
  OracleFile file;
  file.n = j.at("n").get<int>();
  if (file.n < 1 || file.n > 16) fail("oracle tuple size out of range");
  file.ambient_dim = j.at("ambient_dim").get<Index>();
  file.block_dims.assign(size_t{1} << file.n, 0);
  if (!j.contains("blocks") || !j["blocks"].is_array())
    fail("oracle needs a 'blocks' array");
  for (const json& entry : j["blocks"]) {
    reject_unknown_keys(entry, {"subset", "dim"}, "an oracle block");
    if (!entry.contains("subset") || !entry["subset"].is_array())
      fail("oracle block needs a 'subset' array");
    std::uint32_t mask = 0;
    for (const json& member : entry["subset"]) {
      const int i = member.get<int>();
      if (i < 1 || i > file.n) fail("oracle subset member out of range");
      mask |= 1u << (i - 1);
    }
    file.block_dims[mask] = entry.at("dim").get<Index>();
  }
  if (j.contains("joint_wandering_dim"))
    file.joint_wandering_dim = j["joint_wandering_dim"].get<Index>();
  return file;
  });
}

void save_oracle(const std::filesystem::path& path, const OracleFile& oracle) {
  json j;
  j["schema_version"] = "woldkit-oracle/1";
  j["n"] = oracle.n;
  j["ambient_dim"] = oracle.ambient_dim;
  json blocks = json::array();
  for (std::uint32_t mask = 0; mask < oracle.block_dims.size(); ++mask) {
    json subset = json::array();
    for (int i = 1; i <= oracle.n; ++i)
      if (mask & (1u << (i - 1))) subset.push_back(i);
    blocks.push_back(json{{"subset", std::move(subset)},
                          {"dim", oracle.block_dims[mask]}});
  }
  j["blocks"] = std::move(blocks);
  if (oracle.joint_wandering_dim)
    j["joint_wandering_dim"] = *oracle.joint_wandering_dim;
  atomic_write_text(path, j.dump(2) + "\n");
}

FixtureSpec load_fixture_spec(const std::filesystem::path& path) {
  const json j = parse_file(path, "fixture spec");
  return guard_json("fixture spec", [&] {
  if (!j.is_object()) fail("fixture spec top level must be an object");
  reject_unknown_keys(j,
                      {"schema_version", "name", "n", "blocks",
                       "scramble_seed", "atom_seed", "dim_cap"},
                      "the fixture spec");
  if (!j.contains("schema_version") ||
      j["schema_version"].get<std::string>() != "woldkit-fixture/1")
    fail("fixture spec needs schema_version woldkit-fixture/1");
  FixtureSpec spec;
  if (j.contains("name")) spec.name = j["name"].get<std::string>();
  spec.n = j.at("n").get<int>();
  if (!j.contains("blocks") || !j["blocks"].is_array())
    fail("fixture spec needs a 'blocks' array");
  for (const json& bj : j["blocks"]) {
    reject_unknown_keys(bj, {"multiplicity", "atoms"}, "a fixture block");
    BlockRecipe block;
    if (bj.contains("multiplicity"))
      block.multiplicity = bj["multiplicity"].get<int>();
    if (!bj.contains("atoms") || !bj["atoms"].is_array())
      fail("fixture block needs an 'atoms' array");
    for (const json& aj : bj["atoms"]) {
      if (!aj.is_object() || !aj.contains("kind"))
        fail("fixture atoms need a 'kind'");
      const std::string kind = aj["kind"].get<std::string>();
      if (kind == "shift") {
        reject_unknown_keys(aj, {"kind", "depth"}, "a shift atom");
        block.atoms.push_back(ShiftAtom{aj.at("depth").get<int>()});
      } else if (kind == "unitary") {
        reject_unknown_keys(aj, {"kind", "dim", "unitary"}, "a unitary atom");
        UnitaryAtom atom;
        atom.dim = aj.at("dim").get<int>();
        if (aj.contains("unitary")) {
          const std::string u = aj["unitary"].get<std::string>();
          if (u == "circular")
            atom.kind = UnitaryKind::Circular;
          else if (u == "random")
            atom.kind = UnitaryKind::Random;
          else
            fail("unitary atom kind must be 'circular' or 'random'");
        }
        block.atoms.push_back(atom);
      } else {
        fail("fixture atom kind must be 'shift' or 'unitary'");
      }
    }
    spec.blocks.push_back(std::move(block));
  }
  if (j.contains("scramble_seed"))
    spec.scramble_seed = j["scramble_seed"].get<std::uint64_t>();
  if (j.contains("atom_seed")) spec.atom_seed = j["atom_seed"].get<std::uint64_t>();
  if (j.contains("dim_cap")) spec.dim_cap = j["dim_cap"].get<Index>();
  spec.validate();
  return spec;
  });
}

void save_fixture_spec(const std::filesystem::path& path,
                       const FixtureSpec& spec) {
  json j;
  j["schema_version"] = "woldkit-fixture/1";
  if (!spec.name.empty()) j["name"] = spec.name;
  j["n"] = spec.n;
  json blocks = json::array();
  for (const BlockRecipe& block : spec.blocks) {
    json atoms = json::array();
    for (const Atom& atom : block.atoms) {
      if (const auto* s = std::get_if<ShiftAtom>(&atom)) {
        atoms.push_back(json{{"kind", "shift"}, {"depth", s->depth}});
      } else {
        const UnitaryAtom& u = std::get<UnitaryAtom>(atom);
        atoms.push_back(json{
            {"kind", "unitary"},
            {"dim", u.dim},
            {"unitary",
             u.kind == UnitaryKind::Circular ? "circular" : "random"}});
      }
    }
    blocks.push_back(json{{"multiplicity", block.multiplicity},
                          {"atoms", std::move(atoms)}});
  }
  j["blocks"] = std::move(blocks);
  if (spec.scramble_seed) j["scramble_seed"] = *spec.scramble_seed;
  j["atom_seed"] = spec.atom_seed;
  j["dim_cap"] = spec.dim_cap;
  atomic_write_text(path, j.dump(2) + "\n");
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::filesystem::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  const std::filesystem::path tmp =
      dir / (path.filename().string() + ".tmp-" +
             std::to_string(
                 std::hash<std::string>{}(path.string() + text) & 0xffffff));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw InputError("atomic write: cannot create '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out)
      throw InputError("atomic write: write failed for '" + tmp.string() +
                       "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace woldkit
