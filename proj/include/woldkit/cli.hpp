#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace woldkit::cli {

// Process exit codes shared by every subcommand.
inline constexpr int kExitAccepted = 0;
inline constexpr int kExitRejected = 2;
inline constexpr int kExitParseError = 3;
inline constexpr int kExitUnresolved = 4;
inline constexpr int kExitResourceCap = 5;

struct GlobalOptions {
  std::optional<double> rank_tol;
  std::optional<double> residual_tol;
  std::optional<int> max_power;
  std::optional<std::uint64_t> seed;
  std::string json_path;    // write the machine-readable report here
  std::string oracle_path;  // read (decompose) or write (fixture) an oracle
};

// Gate report for a manifest: accepted (0) or rejected (2).
int cmd_check(const std::string& manifest_path, const GlobalOptions& g);

struct DecomposeOptions {
  int depth = 0;  // 0 means the full tuple size
  std::string method = "direct";  // direct | recursive | both
};
int cmd_decompose(const std::string& manifest_path,
                  const DecomposeOptions& opt, const GlobalOptions& g);

struct FixtureOptions {
  std::string preset;
  std::string spec_path;
  std::string out_path;
  bool list = false;
};
int cmd_fixture(const FixtureOptions& opt, const GlobalOptions& g);

// suite: wold | multi | identities | equivalence | all
int cmd_verify(const std::string& manifest_path, const std::string& suite,
               const GlobalOptions& g);

}  // namespace woldkit::cli
