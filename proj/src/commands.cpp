#include "remest/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>

#include "remest/errors.hpp"
#include "remest/instances.hpp"

namespace remest {

namespace fs = std::filesystem;

namespace {

fs::path prepare_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) {
    throw ArgumentError("output directory " + cfg.out_dir.string() + " is not writable");
  }
  return cfg.out_dir;
}

bool report_fsm(const ChannelFsm& fsm, std::ostream& err) {
  const auto violations = validate_fsm(fsm);
  for (const auto& v : violations) {
    err << "invalid channel";
    if (v.state >= 0) err << " state " << v.state;
    err << ": " << v.reason << '\n';
  }
  return violations.empty();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw ArgumentError("cannot write " + p.string());
  return os;
}

std::string stem_of(const std::string& provenance) { return provenance.substr(0, provenance.find(':')); }

json threshold_rows(const ThresholdReport& rep) {
  json rows = json::array();
  const int m = rep.solution.table.num_states();
  for (int n = 1; n <= rep.solution.table.horizon(); ++n) {
    for (State q = 0; q < m; ++q) {
      const auto& r = rep.result(n, q);
      json row = {{"n", n},
                  {"q", q},
                  {"reachable", static_cast<bool>(rep.reachable[static_cast<size_t>(n - 1)][static_cast<size_t>(q)])},
                  {"is_threshold", r.is_threshold}};
      if (r.is_threshold) {
        row["tau"] = format_double(r.rule.tau());
      } else {
        row["reason"] = r.reason;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string means pass
};

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
  RunConfig cfg;
  if (opts.config) {
    cfg = load_run_config(*opts.config);
  } else {
    throw ArgumentError("--config is required");
  }
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.trials) cfg.trials = *opts.trials;
  if (opts.grid_points) cfg.solver.num_points = *opts.grid_points;
  return cfg;
}

int cmd_solve_symmetric(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!report_fsm(cfg.fsm, err)) return kExitUsage;
  require_valid(cfg.plant);
  const fs::path dir = prepare_out_dir(cfg);
  const ErrorGrid grid = cfg.solver.make_grid(cfg.plant);
  const auto rep = solve_and_extract(cfg.plant, cfg.fsm, grid, cfg.solver.value_cap);
  const auto& table = rep.solution.table;

  {
    auto os = open_out(dir / "value_table.csv");
    write_value_table_csv(os, table);
  }
  write_policy_csv(dir / "policy.csv", {rep.threshold_policy, table.provenance, table.initial_value()});

  const auto structure = check_value_structure(table, 1e-8);
  const auto cond = small_drop_condition(cfg.plant, cfg.fsm);
  const auto bound = slope_bound(cfg.plant);
  const double slack = 10.0 * grid.spacing();
  const auto curvature = check_curvature_bound(table, slack);

  json sv = json::array();
  for (size_t i = 0; i < std::min<size_t>(structure.violations.size(), 20); ++i) {
    const auto& v = structure.violations[i];
    sv.push_back({{"n", v.n}, {"q", v.q}, {"e", v.e}, {"what", v.what}});
  }
  json report = {
      {"provenance", table.provenance},
      {"value_structure", {{"ok", structure.ok()}, {"slices", structure.slices_checked}, {"violations", sv}}},
      {"small_drop_condition", {{"v", cond.v}, {"threshold", cond.threshold}, {"satisfied", cond.satisfied}}},
      {"curvature_bound",
       {{"ok", curvature.ok()},
        {"slack", slack},
        {"points_checked", curvature.points_checked},
        {"violations", curvature.violations.size()},
        {"max_quotient", curvature.max_quotient},
        {"bound", bound.v_prime}}},
      {"thresholds",
       {{"not_threshold", rep.not_threshold},
        {"not_threshold_reachable", rep.not_threshold_reachable},
        {"rows", threshold_rows(rep)}}}};
  write_json_file(dir / "structure.json", report);

  json summary = {{"command", "solve-symmetric"},
                  {"provenance", table.provenance},
                  {"value", table.initial_value()},
                  {"initial_state", cfg.fsm.initial_state},
                  {"grid", {{"half_width", grid.half_width()}, {"num_points", grid.size()}}},
                  {"not_threshold_reachable", rep.not_threshold_reachable}};
  write_json_file(dir / "summary.json", summary);

  out << "V1(0, q1) = " << format_double(table.initial_value()) << '\n';
  out << "value structure: " << (structure.ok() ? "ok" : "VIOLATED") << '\n';
  out << "small-drop condition: " << (cond.satisfied ? "holds" : "fails") << " (threshold "
      << format_double(cond.threshold) << ")\n";
  out << "curvature bound: " << (curvature.ok() ? "ok" : "VIOLATED") << '\n';
  out << "non-threshold reachable pairs: " << rep.not_threshold_reachable << '\n';
  out << "wrote " << dir.string() << '\n';
  return kExitOk;
}

int cmd_solve_iid(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.plant.a != 0.0) {
    err << "solve-iid handles white processes only (a = 0, got a = " << format_double(cfg.plant.a)
        << "); use solve-symmetric\n";
    return kExitUsage;
  }
  if (!report_fsm(cfg.fsm, err)) return kExitUsage;
  require_valid(cfg.plant);
  const fs::path dir = prepare_out_dir(cfg);
  const auto table = iid_backward_induction(cfg.fsm, cfg.plant.sigma2, cfg.plant.horizon, cfg.search);
  const std::string prov = provenance_hash(cfg.plant, cfg.fsm);
  {
    auto os = open_out(dir / "iid_table.csv");
    write_iid_table_csv(os, table, prov);
  }
  {
    auto os = open_out(dir / "asymmetry_log.csv");
    os << "n,q,symmetric_objective,objective,tau_lo,tau_hi\n";
    for (const auto& a : table.asymmetry_log) {
      os << a.n << ',' << a.q << ',' << format_double(a.symmetric_objective) << ',' << format_double(a.objective)
         << ',' << format_double(a.tau_lo) << ',' << format_double(a.tau_hi) << '\n';
    }
  }
  write_policy_csv(dir / "policy.csv", {table.policy(), prov, table.initial_value()});
  write_json_file(dir / "summary.json", {{"command", "solve-iid"},
                                         {"provenance", prov},
                                         {"value", table.initial_value()},
                                         {"asymmetric_pairs", table.asymmetry_log.size()}});
  out << "V1(q1) = " << format_double(table.initial_value()) << '\n';
  out << "asymmetric optima: " << table.asymmetry_log.size() << '\n';
  out << "wrote " << dir.string() << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& policy, long trace_trials, std::ostream& out,
                 std::ostream& err) {
  if (!report_fsm(cfg.fsm, err)) return kExitUsage;
  require_valid(cfg.plant);
  if (cfg.trials <= 0) throw ArgumentError("trials must be positive");
  const fs::path dir = prepare_out_dir(cfg);

  PolicyFile file;
  if (policy == "never" || policy == "always") {
    const Rule r = policy == "never" ? Rule::never() : Rule::always();
    file.policy = uniform_policy(cfg.fsm, cfg.plant.horizon, r);
    if (policy == "never") file.value = predicted_open_loop_cost(cfg.plant);
  } else {
    if (policy.empty()) throw ArgumentError("simulate needs --policy <path|never|always>");
    file = read_policy_csv(policy);
    const std::string expect = provenance_hash(cfg.plant, cfg.fsm);
    if (stem_of(file.provenance) != expect) {
      err << "warning: policy provenance " << file.provenance << " does not match config " << expect << '\n';
    }
  }

  std::vector<TraceRow> trace;
  const auto s = simulate(cfg.plant, cfg.fsm, file.policy, cfg.trials, cfg.seed,
                          trace_trials > 0 ? &trace : nullptr, trace_trials);
  json j = summary_to_json(s);
  j["provenance"] = provenance_hash(cfg.plant, cfg.fsm);
  if (file.value) j["predicted"] = *file.value;
  write_json_file(dir / "sim_summary.json", j);
  if (trace_trials > 0) {
    auto os = open_out(dir / "trace.csv");
    write_trace_csv(os, trace);
  }

  out << std::setprecision(10);
  out << "simulated total = " << s.total << " +/- " << s.total_se << " (" << s.trials << " trials, seed " << s.seed
      << ")\n";
  if (file.value) {
    const double z = s.total_se > 0 ? (s.total - *file.value) / s.total_se : 0.0;
    out << "predicted total = " << *file.value << "  (z = " << std::setprecision(3) << z << ")\n";
  }
  return kExitOk;
}

int cmd_verify(const std::optional<RunConfig>& cfg, std::uint64_t seed, bool inject_corruption, std::ostream& out,
               std::ostream& err) {
  PlantModel plant{1.1, 1.0, 0.0, 8};
  ChannelFsm fsm = energy_harvesting_fsm(4, 2, 0.3);
  SolverSettings settings;
  settings.num_points = 801;
  if (cfg) {
    if (!report_fsm(cfg->fsm, err)) return kExitUsage;
    plant = cfg->plant;
    fsm = cfg->fsm;
    settings = cfg->solver;
  }
  require_valid(plant);
  auto table = backward_induction(plant, fsm, settings).table;
  if (inject_corruption) {
    auto& f = table.value(std::min(2, plant.horizon), fsm.initial_state);
    const size_t i = static_cast<size_t>(table.grid.radius() + table.grid.radius() / 2);
    f.set(i, f.at_zero() - 1.0);
  }

  std::vector<Check> checks;
  checks.push_back({"check_value_structure", [&] {
                      const auto r = check_value_structure(table, 1e-8);
                      if (r.ok()) return std::string();
                      const auto& v = r.violations.front();
                      return "V_" + std::to_string(v.n) + "(., " + std::to_string(v.q) + ") " + v.what + " at e = " +
                             format_double(v.e);
                    }});
  checks.push_back({"check_curvature_bound", [&] {
                      const auto r = check_curvature_bound(table, 10.0 * table.grid.spacing());
                      if (r.ok()) return std::string();
                      const auto& v = r.violations.front();
                      return "quotient " + format_double(v.quotient) + " > " + format_double(v.bound) + " at n = " +
                             std::to_string(v.n) + ", e = " + format_double(v.e);
                    }});
  checks.push_back({"open_loop_closed_form", [&] {
                      const PlantModel p{1.1, 1.0, 0.0, 3};
                      SolverSettings s;
                      s.num_points = 401;
                      const double v = backward_induction(p, constant_fsm(1.0), s).table.initial_value();
                      const double want = predicted_open_loop_cost(p);
                      if (std::abs(v - want) <= 1e-9 * want) return std::string();
                      return "DP " + format_double(v) + " vs closed form " + format_double(want);
                    }});
  checks.push_back({"threshold_sweep", [&] {
                      for (int k = 0; k < 20; ++k) {
                        RngStream rng(seed, static_cast<std::uint64_t>(k));
                        const auto inst = random_small_drop_instance(rng, 4, 6);
                        SolverSettings s;
                        s.num_points = 601;
                        const auto rep = solve_and_extract(inst.plant, inst.fsm, s.make_grid(inst.plant));
                        if (rep.not_threshold_reachable > 0) {
                          return "instance " + std::to_string(k) + " has " +
                                 std::to_string(rep.not_threshold_reachable) + " non-threshold pairs";
                        }
                      }
                      return std::string();
                    }});
  checks.push_back({"discrete_oracle", [&] {
                      for (int k = 0; k < 20; ++k) {
                        RngStream rng(seed ^ 0xd15c7e7eull, static_cast<std::uint64_t>(k));
                        const auto inst = random_discrete_instance(rng);
                        const auto dp = discrete_dp(inst);
                        const auto ex = exhaustive_policy_search(inst);
                        if (std::abs(dp.value - ex.optimal_cost) > 1e-12 * std::max(1.0, ex.optimal_cost)) {
                          return "instance " + std::to_string(k) + ": dp " + format_double(dp.value) +
                                 " vs exhaustive " + format_double(ex.optimal_cost);
                        }
                        const int size = static_cast<int>(inst.support.size());
                        const bool structured = std::any_of(ex.minimizers.begin(), ex.minimizers.end(), [&](const auto& p) {
                          return std::all_of(p.masks.begin(), p.masks.end(),
                                             [&](std::uint32_t m) { return is_interval_complement(m, size); });
                        });
                        if (!structured) return "instance " + std::to_string(k) + ": no interval-form optimizer";
                      }
                      return std::string();
                    }});
  checks.push_back({"iid_symmetric_dominance", [&] {
                      const auto t = iid_backward_induction(energy_harvesting_fsm(4, 2, 0.3), 1.0, 3);
                      for (size_t i = 0; i < t.optimum.size(); ++i) {
                        if (t.optimum[i].objective > t.symmetric_objective[i] + 1e-9) {
                          return "unrestricted optimum worse than symmetric at index " + std::to_string(i);
                        }
                      }
                      return std::string();
                    }});

  std::string first_failure;
  for (const auto& c : checks) {
    const std::string detail = c.run();
    out << (detail.empty() ? "PASS " : "FAIL ") << c.name;
    if (!detail.empty()) out << ": " << detail;
    out << '\n';
    if (!detail.empty() && first_failure.empty()) first_failure = c.name;
  }
  if (!first_failure.empty()) {
    err << "verify failed: " << first_failure << '\n';
    return kExitPropertyFailure;
  }
  return kExitOk;
}

json example_config(const std::string& name) {
  const json sim = {{"trials", 100000}, {"seed", 20240601}};
  if (name == "energy_harvesting") {
    return {{"plant", {{"a", 1.1}, {"sigma2", 1.0}, {"x0", 0.0}, {"horizon", 20}}},
            {"channel", {{"builder", "energy_harvesting"}, {"params", {{"capacity", 4}, {"tx_cost", 2}, {"p_tx", 0.3}}}}},
            {"solver", {{"grid", {{"half_width", "auto"}, {"num_points", 2001}}}, {"value_cap", 1e12}}},
            {"sim", sim},
            {"outputs", {{"dir", "out/energy_harvesting"}}}};
  }
  if (name == "workload_chain") {
    return {{"plant", {{"a", 1.1}, {"sigma2", 1.0}, {"x0", 0.0}, {"horizon", 20}}},
            {"channel",
             {{"builder", "workload_chain"}, {"params", {{"window", 4}, {"drop_probs", {0.1, 0.3, 0.5, 0.7, 0.9}}}}}},
            {"solver", {{"grid", {{"half_width", "auto"}, {"num_points", 2001}}}, {"value_cap", 1e12}}},
            {"sim", sim},
            {"outputs", {{"dir", "out/workload_chain"}}}};
  }
  if (name == "iid_energy") {
    return {{"plant", {{"a", 0.0}, {"sigma2", 1.0}, {"x0", 0.0}, {"horizon", 5}}},
            {"channel", {{"builder", "energy_harvesting"}, {"params", {{"capacity", 4}, {"tx_cost", 2}, {"p_tx", 0.3}}}}},
            {"search", {{"coarse_points", 121}, {"span_sigmas", 6.0}, {"tolerance", 1e-6}}},
            {"sim", sim},
            {"outputs", {{"dir", "out/iid_energy"}}}};
  }
  if (name == "never_p1") {
    return {{"plant", {{"a", 1.0}, {"sigma2", 1.0}, {"x0", 0.0}, {"horizon", 2}}},
            {"channel",
             {{"fsm",
               {{"num_states", 1},
                {"transitions", json::array({json::array({0, 0})})},
                {"drop_probs", {1.0}},
                {"initial_state", 0},
                {"transmit_allowed", {true}}}}}},
            {"solver", {{"grid", {{"half_width", "auto"}, {"num_points", 801}}}, {"value_cap", 1e12}}},
            {"sim", sim},
            {"outputs", {{"dir", "out/never_p1"}}}};
  }
  throw ArgumentError("unknown example '" + name + "'");
}

int cmd_export_examples(const fs::path& dir, std::ostream& out) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ArgumentError("cannot create " + dir.string());
  for (const char* name : {"energy_harvesting", "workload_chain", "iid_energy", "never_p1"}) {
    const fs::path p = dir / (std::string(name) + ".json");
    write_json_file(p, example_config(name));
    out << "wrote " << p.string() << '\n';
  }
  return kExitOk;
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (name == "export-examples") return cmd_export_examples(opts.out_dir.value_or("configs"), out);
    if (name == "verify") {
      std::optional<RunConfig> cfg;
      if (opts.config) cfg = resolve_config(opts);
      return cmd_verify(cfg, opts.seed.value_or(cfg ? cfg->seed : 1), opts.inject_corruption, out, err);
    }
    const RunConfig cfg = resolve_config(opts);
    if (name == "solve-symmetric") return cmd_solve_symmetric(cfg, out, err);
    if (name == "solve-iid") return cmd_solve_iid(cfg, out, err);
    if (name == "simulate") return cmd_simulate(cfg, opts.policy, opts.trace_trials, out, err);
    err << "unknown command '" << name << "'\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace remest
