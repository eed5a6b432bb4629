#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "remest/io.hpp"

namespace remest {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitUsage = 2;

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<int> grid_points;
  std::string policy;            ///< simulate: file path, "never" or "always"
  long trace_trials = 0;         ///< simulate: rows for this many trials go to trace.csv
  bool inject_corruption = false;  ///< verify: plant a defect in the value table
};

/// Loads the config (if any) and applies command-line overrides.
RunConfig resolve_config(const CommandOptions& opts);

int cmd_solve_symmetric(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_solve_iid(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, const std::string& policy, long trace_trials, std::ostream& out,
                 std::ostream& err);
int cmd_verify(const std::optional<RunConfig>& cfg, std::uint64_t seed, bool inject_corruption, std::ostream& out,
               std::ostream& err);
int cmd_export_examples(const std::filesystem::path& dir, std::ostream& out);

/// Bundled configs: energy_harvesting, workload_chain, iid_energy, never_p1.
json example_config(const std::string& name);

/// Catches library exceptions and maps them to exit codes.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace remest
