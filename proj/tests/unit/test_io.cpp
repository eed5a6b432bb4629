#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "remest/dp_iid.hpp"
#include "remest/errors.hpp"
#include "remest/io.hpp"
#include "remest/rng.hpp"

using namespace remest;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("remest_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("numbers round trip exactly") {
  RngStream rng(1);
  for (int k = 0; k < 10000; ++k) {
    const double x = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform() * 40 - 20);
    REQUIRE(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(parse_double("inf") == std::numeric_limits<double>::infinity());
  CHECK(parse_double("-inf") == -std::numeric_limits<double>::infinity());
  CHECK(std::isnan(parse_double("nan")));
  CHECK_THROWS_AS(parse_double("1.5x"), ArgumentError);
  CHECK_THROWS_AS(parse_double(""), ArgumentError);
}

TEST_CASE("config channel source is exclusive") {
  json base = {{"plant", {{"a", 1.1}, {"sigma2", 1.0}, {"horizon", 4}}}};
  json cfg = base;
  cfg["channel"] = {{"builder", "energy_harvesting"}, {"params", {{"capacity", 4}, {"tx_cost", 2}, {"p_tx", 0.3}}}};
  const auto rc = run_config_from_json(cfg);
  CHECK(rc.fsm.num_states == 5);
  CHECK(rc.channel_source == "energy_harvesting");
  CHECK_FALSE(rc.solver.half_width.has_value());

  json both = cfg;
  both["channel"]["fsm"] = fsm_to_json(constant_fsm(0.5));
  CHECK_THROWS_AS(run_config_from_json(both), ArgumentError);

  json neither = base;
  neither["channel"] = json::object();
  CHECK_THROWS_AS(run_config_from_json(neither), ArgumentError);

  json unknown = base;
  unknown["channel"] = {{"builder", "gilbert_elliott"}};
  CHECK_THROWS_AS(run_config_from_json(unknown), ArgumentError);

  json inline_cfg = base;
  inline_cfg["channel"] = {{"fsm", fsm_to_json(constant_fsm(0.5))}};
  inline_cfg["solver"] = {{"grid", {{"half_width", 12.5}, {"num_points", 301}}}, {"value_cap", 1e9}};
  const auto ri = run_config_from_json(inline_cfg);
  CHECK(ri.channel_source == "inline");
  CHECK(*ri.solver.half_width == 12.5);
  CHECK(ri.solver.num_points == 301);

  // a config serialized and read back is the same instance
  const auto again = run_config_from_json(json::parse(run_config_to_json(ri).dump()));
  CHECK(provenance_hash(again.plant, again.fsm) == provenance_hash(ri.plant, ri.fsm));
}

TEST_CASE("threshold policy file round trip") {
  const PlantModel plant{1.1, 1.0, 0.0, 6};
  const auto fsm = energy_harvesting_fsm(4, 2, 0.3);
  SolverSettings s;
  s.num_points = 801;
  const auto rep = solve_and_extract(plant, fsm, s.make_grid(plant));
  const auto dir = scratch_dir("thr");
  write_policy_csv(dir / "policy.csv", {rep.threshold_policy, rep.solution.table.provenance,
                                        rep.solution.table.initial_value()});
  const auto back = read_policy_csv(dir / "policy.csv");
  CHECK(back.provenance == rep.solution.table.provenance);
  CHECK(*back.value == rep.solution.table.initial_value());
  CHECK(back.policy.alignment == StageAlignment::carried_error);
  RngStream rng(2);
  for (int k = 0; k < 20000; ++k) {
    const int n = 1 + static_cast<int>(rng.uniform() * 6);
    const State q = static_cast<State>(rng.uniform() * 5);
    const double e = rng.normal(4.0);
    REQUIRE(decide(back.policy, n, q, e) == decide(rep.threshold_policy, n, q, e));
  }
}

TEST_CASE("gridded policy file round trip") {
  const PlantModel plant{1.1, 1.0, 0.0, 3};
  const auto fsm = energy_harvesting_fsm(4, 2, 0.3);
  SolverSettings s;
  s.num_points = 301;
  const auto sol = backward_induction(plant, fsm, s);
  const auto dir = scratch_dir("grid");
  write_policy_csv(dir / "policy.csv", {sol.policy, sol.table.provenance, std::nullopt});
  CHECK(fs::exists(dir / "policy_grid.csv"));
  const auto back = read_policy_csv(dir / "policy.csv");
  REQUIRE(back.policy.grid.has_value());
  CHECK(*back.policy.grid == *sol.policy.grid);
  for (int n = 1; n <= 3; ++n) {
    for (State q = 0; q < 5; ++q) {
      for (int i = 0; i < back.policy.grid->size(); ++i) {
        const double e = back.policy.grid->point(i);
        REQUIRE(decide(back.policy, n, q, e) == decide(sol.policy, n, q, e));
      }
    }
  }
}

TEST_CASE("interval policy file round trip") {
  const auto fsm = energy_harvesting_fsm(4, 2, 0.3);
  const auto t = iid_backward_induction(fsm, 1.0, 3);
  const auto dir = scratch_dir("iid");
  write_policy_csv(dir / "policy.csv", {t.policy(), "x", t.initial_value()});
  const auto back = read_policy_csv(dir / "policy.csv");
  CHECK_FALSE(back.policy.symmetric);
  for (size_t i = 0; i < back.policy.rules.size(); ++i) {
    CHECK(back.policy.rules[i].tau_lo == t.policy().rules[i].tau_lo);
    CHECK(back.policy.rules[i].tau_hi == t.policy().rules[i].tau_hi);
    CHECK(back.policy.rules[i].kind == t.policy().rules[i].kind);
  }
}

TEST_CASE("malformed policy files are rejected") {
  const auto dir = scratch_dir("bad");
  {
    std::ofstream os(dir / "p.csv");
    os << "# provenance=x\nn,q,kind,tau_lo,tau_hi\n1,0,symmetric_threshold,-1,1\n";
  }
  CHECK_THROWS_AS(read_policy_csv(dir / "p.csv"), ArgumentError);
  CHECK_THROWS_AS(read_policy_csv(dir / "missing.csv"), ArgumentError);
}

TEST_CASE("value table export") {
  const PlantModel plant{1.1, 1.0, 0.0, 2};
  SolverSettings s;
  s.num_points = 101;
  const auto sol = backward_induction(plant, energy_harvesting_fsm(4, 2, 0.3), s);
  std::ostringstream os;
  write_value_table_csv(os, sol.table);
  std::istringstream in(os.str());
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line.rfind("# provenance=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "n,q,e,V,C0,C1,transmit");
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3 * 5 * 101);
}
