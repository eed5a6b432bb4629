#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "remest/channel.hpp"
#include "remest/dp_iid.hpp"
#include "remest/dp_symmetric.hpp"
#include "remest/policy.hpp"
#include "remest/process.hpp"
#include "remest/simulate.hpp"

namespace remest {

using json = nlohmann::json;

/// Shortest decimal that parses back to the same double; "inf", "-inf", "nan".
std::string format_double(double x);
/// Inverse of format_double. Throws ArgumentError on trailing garbage.
double parse_double(std::string_view s);

json fsm_to_json(const ChannelFsm& fsm);
/// Structural parse only; run validate_fsm for semantic checks.
ChannelFsm fsm_from_json(const json& j);

json plant_to_json(const PlantModel& plant);
PlantModel plant_from_json(const json& j);

json solver_settings_to_json(const SolverSettings& s);
SolverSettings solver_settings_from_json(const json& j);

/// 16 hex digits of FNV-1a over the canonical JSON of plant and channel.
std::string provenance_hash(const PlantModel& plant, const ChannelFsm& fsm);
std::string settings_hash(const ErrorGrid& grid, double value_cap);

struct RunConfig {
  PlantModel plant;
  ChannelFsm fsm;
  std::string channel_source;  ///< builder name or "inline"
  SolverSettings solver;
  SearchSettings search;
  long trials = 100000;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
};

/// Channel comes from exactly one of "channel.fsm" (inline) or
/// "channel.builder" + "channel.params". Throws ArgumentError.
RunConfig run_config_from_json(const json& j);
RunConfig load_run_config(const std::filesystem::path& path);
json run_config_to_json(const RunConfig& cfg);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

// CSV exports. Header comment lines start with '#'.

void write_value_table_csv(std::ostream& os, const ValueTable& table);
void write_iid_table_csv(std::ostream& os, const IidValueTable& table, const std::string& provenance);
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

struct PolicyFile {
  TransmitPolicy policy;
  std::string provenance;
  std::optional<double> value;  ///< predicted total cost when known
};

/// Writes `path` with one (n, q, kind, tau_lo, tau_hi) row per pair. Gridded
/// rows also go to `<stem>_grid.csv` as (n, q, e, transmit).
void write_policy_csv(const std::filesystem::path& path, const PolicyFile& file);
PolicyFile read_policy_csv(const std::filesystem::path& path);
std::filesystem::path policy_grid_path(const std::filesystem::path& path);

std::string rule_kind_name(RuleKind k);
RuleKind rule_kind_from_name(std::string_view s);

json summary_to_json(const SimSummary& s);

}  // namespace remest
