#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "woldkit/fixtures.hpp"
#include "woldkit/operators.hpp"
#include "woldkit/types.hpp"

namespace woldkit {

// On-disk description of one tuple: dense operators either inline or as
// Matrix Market file references (resolved relative to the manifest), an
// optional interior projector and optional tolerance overrides.
struct TupleManifest {
  std::string schema_version = "woldkit/1";
  Index ambient_dim = 0;
  std::vector<ComplexMatrix> operators;
  std::optional<ComplexMatrix> interior_projector;
  std::optional<ToleranceConfig> tolerances;
};

TupleManifest load_manifest(const std::filesystem::path& path);
// Saves with all operators inline; the write is atomic (temp file + rename).
void save_manifest(const std::filesystem::path& path, const TupleManifest& m);

IsometryTuple to_tuple(const TupleManifest& m);
TupleManifest manifest_from(const IsometryTuple& tuple);

// Expected block dimensions for judging a computed decomposition.
struct OracleFile {
  int n = 0;
  Index ambient_dim = 0;
  std::vector<Index> block_dims;  // indexed by subset mask, size 2^n
  std::optional<Index> joint_wandering_dim;
};

OracleFile oracle_from(const FixtureOracle& oracle);
OracleFile load_oracle(const std::filesystem::path& path);
void save_oracle(const std::filesystem::path& path, const OracleFile& oracle);

FixtureSpec load_fixture_spec(const std::filesystem::path& path);
void save_fixture_spec(const std::filesystem::path& path,
                       const FixtureSpec& spec);

// Writes text through a temporary file in the same directory and renames it
// into place, so readers never observe a half-written file.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text);

}  // namespace woldkit
