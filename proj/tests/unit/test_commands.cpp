#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "remest/commands.hpp"

using namespace remest;
namespace fs = std::filesystem;

namespace {

fs::path write_config(const std::string& name, const json& j) {
  const fs::path dir = fs::temp_directory_path() / "remest_cmd";
  fs::create_directories(dir);
  const fs::path p = dir / (name + ".json");
  write_json_file(p, j);
  return p;
}

struct Run {
  int rc;
  std::string out, err;
};

Run run(const std::string& cmd, CommandOptions opts) {
  std::ostringstream out, err;
  const int rc = run_command(cmd, opts, out, err);
  return {rc, out.str(), err.str()};
}

}  // namespace

TEST_CASE("invalid channel exits with usage status and lists the problem") {
  json cfg = example_config("never_p1");
  cfg["channel"]["fsm"]["drop_probs"] = {1.2};
  CommandOptions o;
  o.config = write_config("bad_fsm", cfg);
  o.out_dir = fs::temp_directory_path() / "remest_cmd" / "bad";
  const auto r = run("solve-symmetric", o);
  CHECK(r.rc == kExitUsage);
  CHECK(r.err.find("probability out of range") != std::string::npos);
}

TEST_CASE("white-process solver refuses a dynamic plant") {
  json cfg = example_config("iid_energy");
  cfg["plant"]["a"] = 0.5;
  CommandOptions o;
  o.config = write_config("iid_bad", cfg);
  const auto r = run("solve-iid", o);
  CHECK(r.rc == kExitUsage);
  CHECK(r.err.find("solve-symmetric") != std::string::npos);
}

TEST_CASE("solve then simulate round trip") {
  json cfg = example_config("energy_harvesting");
  cfg["plant"]["horizon"] = 6;
  cfg["solver"]["grid"]["num_points"] = 801;
  CommandOptions o;
  o.config = write_config("energy_small", cfg);
  o.out_dir = fs::temp_directory_path() / "remest_cmd" / "energy_small";
  const auto solved = run("solve-symmetric", o);
  REQUIRE(solved.rc == kExitOk);
  for (const char* f : {"value_table.csv", "policy.csv", "structure.json", "summary.json"}) {
    CHECK(fs::exists(*o.out_dir / f));
  }
  const auto summary = read_json_file(*o.out_dir / "summary.json");
  o.policy = (*o.out_dir / "policy.csv").string();
  o.trials = 20000;
  const auto sim = run("simulate", o);
  REQUIRE(sim.rc == kExitOk);
  CHECK(sim.err.find("warning") == std::string::npos);
  const auto s = read_json_file(*o.out_dir / "sim_summary.json");
  CHECK(std::abs(s["total"].get<double>() - summary["value"].get<double>()) <= 3.0 * s["total_se"].get<double>());
  CHECK(s["predicted"].get<double>() == summary["value"].get<double>());

  // same inputs, same artifacts
  const auto again = run("simulate", o);
  CHECK(read_json_file(*o.out_dir / "sim_summary.json") == s);
}

TEST_CASE("simulate guards") {
  CommandOptions o;
  o.config = write_config("never", example_config("never_p1"));
  o.out_dir = fs::temp_directory_path() / "remest_cmd" / "never";
  o.policy = "never";
  o.trials = 0;
  CHECK(run("simulate", o).rc == kExitUsage);
  o.trials = 1000;
  CHECK(run("simulate", o).rc == kExitOk);
  o.policy = "/nonexistent/policy.csv";
  CHECK(run("simulate", o).rc == kExitUsage);
}

TEST_CASE("verify passes and catches a planted defect") {
  CommandOptions o;
  o.seed = 5;
  const auto ok = run("verify", o);
  CHECK(ok.rc == kExitOk);
  o.inject_corruption = true;
  const auto bad = run("verify", o);
  CHECK(bad.rc == kExitPropertyFailure);
  CHECK(bad.err.find("check_value_structure") != std::string::npos);
}

TEST_CASE("unknown command and missing config") {
  CHECK(run("frobnicate", {}).rc == kExitUsage);
  CHECK(run("solve-symmetric", {}).rc == kExitUsage);
}
