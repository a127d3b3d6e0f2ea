#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "woldkit/cli.hpp"

int main(int argc, char** argv) {
  using namespace woldkit::cli;

  CLI::App app{
      "woldkit: shift/unitary block structure of commuting isometry tuples"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  double rank_tol = 0.0, residual_tol = 0.0;
  int max_power = 0;
  std::uint64_t seed = 0;
  auto* rank_opt = app.add_option("--rank-tol", rank_tol,
                                  "relative singular value cutoff for ranks");
  auto* residual_opt = app.add_option(
      "--residual-tol", residual_tol, "acceptance threshold for residuals");
  auto* power_opt =
      app.add_option("--max-power", max_power, "iteration budget per sweep");
  auto* seed_opt = app.add_option(
      "--seed", seed, "scramble seed override for fixture construction");
  app.add_option("--json", global.json_path,
                 "write the report as JSON to this path");
  app.add_option("--oracle", global.oracle_path,
                 "expected-dimension file to check against (decompose) or "
                 "write (fixture)");

  std::string manifest_path;
  DecomposeOptions decompose_opts;
  FixtureOptions fixture_opts;
  std::string suite = "all";

  CLI::App* check = app.add_subcommand(
      "check", "run the acceptance gate on a tuple manifest");
  check->add_option("manifest", manifest_path, "tuple manifest (JSON)")
      ->required();

  CLI::App* decompose = app.add_subcommand(
      "decompose", "compute the block decomposition of a tuple manifest");
  decompose->add_option("manifest", manifest_path, "tuple manifest (JSON)")
      ->required();
  decompose->add_option("--depth", decompose_opts.depth,
                        "number of leading coordinates to split on "
                        "(default: all)");
  decompose->add_option("--method", decompose_opts.method,
                        "direct, recursive or both");

  CLI::App* fixture = app.add_subcommand(
      "fixture", "build a model tuple with known structure");
  fixture->add_option("--preset", fixture_opts.preset, "named construction");
  fixture->add_option("--spec", fixture_opts.spec_path,
                      "fixture spec file (JSON)");
  fixture->add_option("--out", fixture_opts.out_path,
                      "where to write the tuple manifest");
  fixture->add_flag("--list", fixture_opts.list, "list preset names");

  CLI::App* verify = app.add_subcommand(
      "verify", "run a verification suite against a tuple manifest");
  verify->add_option("manifest", manifest_path, "tuple manifest (JSON)")
      ->required();
  verify->add_option("--suite", suite,
                     "wold, multi, identities, equivalence or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }

  if (*rank_opt) global.rank_tol = rank_tol;
  if (*residual_opt) global.residual_tol = residual_tol;
  if (*power_opt) global.max_power = max_power;
  if (*seed_opt) global.seed = seed;

  if (check->parsed()) return cmd_check(manifest_path, global);
  if (decompose->parsed())
    return cmd_decompose(manifest_path, decompose_opts, global);
  if (fixture->parsed()) return cmd_fixture(fixture_opts, global);
  if (verify->parsed()) return cmd_verify(manifest_path, suite, global);
  return kExitParseError;
}
