// nambu: simulate Nambu flows, run verification suites, recover conformal
// densities and scan Hamilton-Jacobi sections.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, int code,
         std::optional<double> last_valid_time = std::nullopt) {
  nlohmann::json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  if (last_valid_time) j["last_valid_time"] = *last_valid_time;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nambu::cli;

  CLI::App app{"Volume Nambu-Poisson mechanics: flows, brackets and Hamilton-Jacobi checks", "nambu"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  Options options;
  app.add_option("--config", config_path, "JSON run configuration");
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  auto* out_opt = app.add_option("--out", out_dir, "directory for output files");
  app.add_option("--format", options.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* simulate = app.add_subcommand("simulate", "integrate each initial condition and report drifts");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  verify->add_option("suite", suite, "bracket, fi, hj, lagrangian or system")->required();
  auto* density = app.add_subcommand("derive-density", "recover the conformal density at sampled points");
  auto* scan = app.add_subcommand("hj-scan", "residuals of a lambda family of sections");
  auto* list = app.add_subcommand("list-systems", "print the built-in systems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kUsage);
  }
  if (*seed_opt) options.seed = seed;
  if (*out_opt) options.out = out_dir;

  try {
    if (list->parsed()) return cmd_list_systems(options, std::cout);
    if (config_path.empty()) throw UsageError("--config is required");
    const RunConfig config = load_config(config_path);
    if (simulate->parsed()) return cmd_simulate(config, options, std::cout);
    if (verify->parsed()) return cmd_verify(config, suite, options, std::cout);
    if (density->parsed()) return cmd_derive_density(config, options, std::cout);
    if (scan->parsed()) return cmd_hj_scan(config, options, std::cout);
  } catch (const UsageError& e) {
    return fail("usage", e.what(), kUsage);
  } catch (const nambu::ParseError& e) {
    return fail("parse", e.what(), kUsage);
  } catch (const nambu::InvalidArgument& e) {
    return fail("invalid_argument", e.what(), kUsage);
  } catch (const nambu::IntegrationError& e) {
    return fail("integration", e.what(), kRuntime, e.last_valid_time());
  } catch (const nambu::DomainError& e) {
    return fail("domain", e.what(), kRuntime);
  } catch (const nambu::DegenerateInput& e) {
    return fail("degenerate", e.what(), kRuntime);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), kRuntime);
  }
  return fail("usage", "no command given", kUsage);
}
