#include <iostream>

#include <CLI11.hpp>

#include "remest/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Remote estimation over use-dependent packet-drop channels"};
  app.require_subcommand(1);

  remest::CommandOptions opts;
  std::string config, out_dir;
  std::uint64_t seed = 0;
  long trials = 0;
  int grid_points = 0;

  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Run configuration (JSON)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--trials", trials, "Monte Carlo trials");
    sub->add_option("--grid-points", grid_points, "Error grid points (odd)");
  };

  auto* solve_sym = app.add_subcommand("solve-symmetric", "Symmetric-policy DP; writes value table, thresholds, report");
  auto* solve_iid = app.add_subcommand("solve-iid", "Interval-policy DP for a white process (a = 0)");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of a policy");
  auto* verify = app.add_subcommand("verify", "Run the bundled property suite");
  auto* examples = app.add_subcommand("export-examples", "Write the bundled example configs");
  for (auto* s : {solve_sym, solve_iid, sim, verify, examples}) add_globals(s);
  sim->add_option("--policy", opts.policy, "Policy CSV, or 'never' / 'always'")->required();
  sim->add_option("--trace", opts.trace_trials, "Write trace.csv for the first N trials");
  verify->add_flag("--inject-corruption", opts.inject_corruption, "Plant a defect in the value table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : remest::kExitUsage;
  }

  auto given = [](CLI::App* sub, const char* flag) { return sub->count(flag) > 0; };
  CLI::App* active = app.get_subcommands().front();
  if (given(active, "--config")) opts.config = config;
  if (given(active, "--out")) opts.out_dir = out_dir;
  if (given(active, "--seed")) opts.seed = seed;
  if (given(active, "--trials")) opts.trials = trials;
  if (given(active, "--grid-points")) opts.grid_points = grid_points;
  return remest::run_command(active->get_name(), opts, std::cout, std::cerr);
}
