#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "cli/config.hpp"

namespace nambu::cli {

struct Options {
  // Directory for data files; the current directory when unset.
  std::optional<std::string> out;
  // "json" or "csv"; selects the summary printed on stdout and the
  // trajectory file format.
  std::string format = "json";
  // Overrides the config seed.
  std::optional<std::uint64_t> seed;
};

/// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kCheckFailure = 1;
inline constexpr int kUsage = 2;
inline constexpr int kRuntime = 3;

int cmd_simulate(const RunConfig& config, const Options& options, std::ostream& out);
/// suite: bracket, fi, hj, lagrangian or system.
int cmd_verify(const RunConfig& config, const std::string& suite, const Options& options, std::ostream& out);
int cmd_derive_density(const RunConfig& config, const Options& options, std::ostream& out);
int cmd_hj_scan(const RunConfig& config, const Options& options, std::ostream& out);
int cmd_list_systems(const Options& options, std::ostream& out);

}  // namespace nambu::cli
