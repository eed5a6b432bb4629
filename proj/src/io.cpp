#include "remest/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "remest/errors.hpp"

namespace remest {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw NumericOverflowError("cannot format double");
  return {buf, end};
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ArgumentError("not a number: '" + std::string(s) + "'");
  }
  return x;
}

namespace {

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ArgumentError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("bad field '") + key + "': " + e.what());
  }
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex16(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<size_t>(i)] = digits[h & 0xf];
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

int parse_int(const std::string& s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ArgumentError("not an integer: '" + s + "'");
  return v;
}

std::string alignment_name(StageAlignment a) {
  return a == StageAlignment::carried_error ? "carried_error" : "current_sample";
}

StageAlignment alignment_from_name(const std::string& s) {
  if (s == "carried_error") return StageAlignment::carried_error;
  if (s == "current_sample") return StageAlignment::current_sample;
  throw ArgumentError("unknown stage alignment '" + s + "'");
}

ChannelFsm fsm_from_builder(const std::string& name, const json& params) {
  if (name == "energy_harvesting") {
    return energy_harvesting_fsm(get_field<int>(params, "capacity"), get_field<int>(params, "tx_cost"),
                                 get_field<double>(params, "p_tx"));
  }
  if (name == "workload_chain") {
    const auto probs = get_field<std::vector<double>>(params, "drop_probs");
    return workload_chain_fsm(get_field<int>(params, "window"), probs);
  }
  throw ArgumentError("unknown channel builder '" + name + "' (expected energy_harvesting or workload_chain)");
}

}  // namespace

json fsm_to_json(const ChannelFsm& fsm) {
  json tr = json::array();
  for (const auto& t : fsm.transitions) {
    tr.push_back({t.on_silent, t.on_transmit ? json(*t.on_transmit) : json(nullptr)});
  }
  json allowed = json::array();
  for (bool b : fsm.transmit_allowed) allowed.push_back(b);
  return {{"num_states", fsm.num_states},
          {"transitions", tr},
          {"drop_probs", fsm.drop_probs},
          {"initial_state", fsm.initial_state},
          {"transmit_allowed", allowed}};
}

ChannelFsm fsm_from_json(const json& j) {
  ChannelFsm fsm;
  fsm.num_states = get_field<int>(j, "num_states");
  fsm.drop_probs = get_field<std::vector<double>>(j, "drop_probs");
  fsm.initial_state = get_field<int>(j, "initial_state");
  fsm.transmit_allowed = get_field<std::vector<bool>>(j, "transmit_allowed");
  const json& tr = j.at("transitions");
  if (!tr.is_array()) throw ArgumentError("transitions must be an array");
  for (const auto& row : tr) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer()) {
      throw ArgumentError("each transition must be [q0_target, q1_target|null]");
    }
    Transition t;
    t.on_silent = row[0].get<int>();
    if (!row[1].is_null()) {
      if (!row[1].is_number_integer()) throw ArgumentError("q1_target must be an integer or null");
      t.on_transmit = row[1].get<int>();
    }
    fsm.transitions.push_back(t);
  }
  return fsm;
}

json plant_to_json(const PlantModel& p) {
  return {{"a", p.a}, {"sigma2", p.sigma2}, {"x0", p.x0}, {"horizon", p.horizon}};
}

PlantModel plant_from_json(const json& j) {
  PlantModel p;
  p.a = get_field<double>(j, "a");
  p.sigma2 = get_field<double>(j, "sigma2");
  p.x0 = j.contains("x0") ? get_field<double>(j, "x0") : 0.0;
  p.horizon = get_field<int>(j, "horizon");
  return p;
}

json solver_settings_to_json(const SolverSettings& s) {
  json grid = {{"num_points", s.num_points}};
  grid["half_width"] = s.half_width ? json(*s.half_width) : json("auto");
  return {{"grid", grid}, {"value_cap", s.value_cap}, {"cap_sigmas", s.cap_sigmas}};
}

SolverSettings solver_settings_from_json(const json& j) {
  SolverSettings s;
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (g.contains("half_width")) {
      const json& hw = g.at("half_width");
      if (hw.is_string()) {
        if (hw.get<std::string>() != "auto") throw ArgumentError("grid.half_width must be a number or \"auto\"");
      } else {
        s.half_width = get_field<double>(g, "half_width");
      }
    }
    if (g.contains("num_points")) s.num_points = get_field<int>(g, "num_points");
  }
  if (j.contains("value_cap")) s.value_cap = get_field<double>(j, "value_cap");
  if (j.contains("cap_sigmas")) s.cap_sigmas = get_field<double>(j, "cap_sigmas");
  return s;
}

std::string provenance_hash(const PlantModel& plant, const ChannelFsm& fsm) {
  const json j = {{"plant", plant_to_json(plant)}, {"fsm", fsm_to_json(fsm)}};
  return hex16(fnv1a(j.dump()));
}

std::string settings_hash(const ErrorGrid& grid, double value_cap) {
  const std::string s = format_double(grid.half_width()) + "/" + std::to_string(grid.size()) + "/" +
                        format_double(value_cap);
  return hex16(fnv1a(s)).substr(0, 8);
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  RunConfig cfg;
  cfg.plant = plant_from_json(j.at("plant"));
  if (!j.contains("channel")) throw ArgumentError("missing field 'channel'");
  const json& ch = j.at("channel");
  const bool has_fsm = ch.contains("fsm");
  const bool has_builder = ch.contains("builder");
  if (has_fsm == has_builder) throw ArgumentError("channel needs exactly one of 'fsm' or 'builder'");
  if (has_fsm) {
    cfg.fsm = fsm_from_json(ch.at("fsm"));
    cfg.channel_source = "inline";
  } else {
    cfg.channel_source = get_field<std::string>(ch, "builder");
    cfg.fsm = fsm_from_builder(cfg.channel_source, ch.value("params", json::object()));
  }
  if (j.contains("solver")) cfg.solver = solver_settings_from_json(j.at("solver"));
  if (j.contains("search")) {
    const json& s = j.at("search");
    if (s.contains("coarse_points")) cfg.search.coarse_points = get_field<int>(s, "coarse_points");
    if (s.contains("span_sigmas")) cfg.search.span_sigmas = get_field<double>(s, "span_sigmas");
    if (s.contains("tolerance")) cfg.search.tolerance = get_field<double>(s, "tolerance");
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    if (s.contains("trials")) cfg.trials = get_field<long>(s, "trials");
    if (s.contains("seed")) cfg.seed = get_field<std::uint64_t>(s, "seed");
  }
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    if (o.contains("dir")) cfg.out_dir = get_field<std::string>(o, "dir");
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) { return run_config_from_json(read_json_file(path)); }

json run_config_to_json(const RunConfig& cfg) {
  return {{"plant", plant_to_json(cfg.plant)},
          {"channel", {{"fsm", fsm_to_json(cfg.fsm)}}},
          {"solver", solver_settings_to_json(cfg.solver)},
          {"search",
           {{"coarse_points", cfg.search.coarse_points},
            {"span_sigmas", cfg.search.span_sigmas},
            {"tolerance", cfg.search.tolerance}}},
          {"sim", {{"trials", cfg.trials}, {"seed", cfg.seed}}},
          {"outputs", {{"dir", cfg.out_dir.string()}}}};
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ArgumentError(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_value_table_csv(std::ostream& os, const ValueTable& t) {
  os << "# provenance=" << t.provenance << '\n';
  os << "n,q,e,V,C0,C1,transmit\n";
  const int N = t.horizon();
  const int m = t.num_states();
  for (int n = 1; n <= N + 1; ++n) {
    for (State q = 0; q < m; ++q) {
      const size_t idx = t.index(n, q);
      const auto& V = t.V[idx];
      for (int i = 0; i < t.grid.size(); ++i) {
        const auto ui = static_cast<size_t>(i);
        os << n << ',' << q << ',' << format_double(t.grid.point(i)) << ',' << format_double(V[ui]) << ',';
        if (n <= N) {
          os << format_double(t.C0[idx][ui]) << ',';
          if (t.C1[idx]) os << format_double((*t.C1[idx])[ui]);
          os << ',' << (t.transmit[idx][ui] ? 1 : 0);
        } else {
          os << ",,";
        }
        os << '\n';
      }
    }
  }
}

void write_iid_table_csv(std::ostream& os, const IidValueTable& t, const std::string& provenance) {
  os << "# provenance=" << provenance << '\n';
  os << "n,q,tau_lo,tau_hi,V,p_transmit,symmetric_objective,objective\n";
  for (int n = 1; n <= t.horizon; ++n) {
    for (State q = 0; q < t.num_states; ++q) {
      const auto& o = t.at(n, q);
      const auto idx = static_cast<size_t>((n - 1) * t.num_states + q);
      os << n << ',' << q << ',' << format_double(o.tau_lo) << ',' << format_double(o.tau_hi) << ','
         << format_double(t.value(n, q)) << ',' << format_double(o.p_transmit) << ','
         << format_double(t.symmetric_objective[idx]) << ',' << format_double(o.objective) << '\n';
    }
  }
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "trial,n,x,xhat,e,r,c,q\n";
  for (const auto& r : rows) {
    os << r.trial << ',' << r.n << ',' << format_double(r.x) << ',' << format_double(r.xhat) << ','
       << format_double(r.e) << ',' << r.r << ',' << r.c << ',' << r.q << '\n';
  }
}

std::string rule_kind_name(RuleKind k) {
  switch (k) {
    case RuleKind::gridded: return "gridded";
    case RuleKind::symmetric_threshold: return "symmetric_threshold";
    case RuleKind::interval_pair: return "interval_pair";
    case RuleKind::always_transmit: return "always_transmit";
  }
  return "?";
}

RuleKind rule_kind_from_name(std::string_view s) {
  if (s == "gridded") return RuleKind::gridded;
  if (s == "symmetric_threshold") return RuleKind::symmetric_threshold;
  if (s == "interval_pair") return RuleKind::interval_pair;
  if (s == "always_transmit") return RuleKind::always_transmit;
  throw ArgumentError("unknown rule kind '" + std::string(s) + "'");
}

fs::path policy_grid_path(const fs::path& path) {
  fs::path p = path;
  p.replace_filename(path.stem().string() + "_grid.csv");
  return p;
}

void write_policy_csv(const fs::path& path, const PolicyFile& file) {
  const auto& pol = file.policy;
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write " + path.string());
  os << "# provenance=" << file.provenance << '\n';
  os << "# kind=" << rule_kind_name(pol.kind) << '\n';
  os << "# alignment=" << alignment_name(pol.alignment) << '\n';
  os << "# symmetric=" << (pol.symmetric ? 1 : 0) << '\n';
  os << "# horizon=" << pol.horizon << '\n';
  os << "# num_states=" << pol.num_states << '\n';
  os << "# masked=";
  for (size_t q = 0; q < pol.masked.size(); ++q) os << (q ? ";" : "") << (pol.masked[q] ? 1 : 0);
  os << '\n';
  if (file.value) os << "# value=" << format_double(*file.value) << '\n';
  if (pol.grid) os << "# grid=" << format_double(pol.grid->half_width()) << ';' << pol.grid->size() << '\n';
  os << "n,q,kind,tau_lo,tau_hi\n";

  std::ofstream gs;
  for (int n = 1; n <= pol.horizon; ++n) {
    for (State q = 0; q < pol.num_states; ++q) {
      const Rule& r = pol.rule(n, q);
      os << n << ',' << q << ',' << rule_kind_name(r.kind) << ',';
      if (r.kind == RuleKind::gridded) {
        os << ",\n";
        if (!pol.grid) throw ArgumentError("gridded rule without a grid");
        if (!gs.is_open()) {
          gs.open(policy_grid_path(path));
          if (!gs) throw ArgumentError("cannot write " + policy_grid_path(path).string());
          gs << "n,q,e,transmit\n";
        }
        for (int i = 0; i < pol.grid->size(); ++i) {
          gs << n << ',' << q << ',' << format_double(pol.grid->point(i)) << ','
             << (r.transmit[static_cast<size_t>(i)] ? 1 : 0) << '\n';
        }
      } else {
        os << format_double(r.tau_lo) << ',' << format_double(r.tau_hi) << '\n';
      }
    }
  }
}

PolicyFile read_policy_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  PolicyFile file;
  auto& pol = file.policy;
  std::map<std::string, std::string> header;
  std::string line;
  bool saw_columns = false;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto key = line.substr(1, eq - 1);
      while (!key.empty() && key.front() == ' ') key.erase(0, 1);
      header[key] = line.substr(eq + 1);
      continue;
    }
    if (!saw_columns) {
      if (line != "n,q,kind,tau_lo,tau_hi") throw ArgumentError(path.string() + ": unexpected header '" + line + "'");
      saw_columns = true;
      continue;
    }
    rows.push_back(split(line, ','));
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) throw ArgumentError(path.string() + ": missing '# " + key + "=' header");
    return it->second;
  };
  file.provenance = need("provenance");
  pol.kind = rule_kind_from_name(need("kind"));
  pol.alignment = alignment_from_name(need("alignment"));
  pol.symmetric = need("symmetric") == "1";
  pol.horizon = parse_int(need("horizon"));
  pol.num_states = parse_int(need("num_states"));
  if (pol.horizon < 1 || pol.num_states < 1) throw ArgumentError(path.string() + ": bad dimensions");
  for (const auto& s : split(need("masked"), ';')) pol.masked.push_back(parse_int(s) != 0);
  if (static_cast<int>(pol.masked.size()) != pol.num_states) throw ArgumentError(path.string() + ": bad masked list");
  if (header.count("value")) file.value = parse_double(header["value"]);
  if (header.count("grid")) {
    const auto parts = split(header["grid"], ';');
    if (parts.size() != 2) throw ArgumentError(path.string() + ": bad grid header");
    pol.grid = ErrorGrid(parse_double(parts[0]), parse_int(parts[1]));
  }

  const auto count = static_cast<size_t>(pol.horizon * pol.num_states);
  if (rows.size() != count) throw ArgumentError(path.string() + ": expected " + std::to_string(count) + " rows");
  pol.rules.assign(count, Rule{});
  std::vector<bool> seen(count, false);
  bool any_gridded = false;
  for (const auto& row : rows) {
    if (row.size() != 5) throw ArgumentError(path.string() + ": rows need 5 columns");
    const int n = parse_int(row[0]);
    const int q = parse_int(row[1]);
    if (n < 1 || n > pol.horizon || q < 0 || q >= pol.num_states) throw ArgumentError(path.string() + ": index out of range");
    const auto idx = static_cast<size_t>((n - 1) * pol.num_states + q);
    if (seen[idx]) throw ArgumentError(path.string() + ": duplicate row");
    seen[idx] = true;
    Rule& r = pol.rules[idx];
    r.kind = rule_kind_from_name(row[2]);
    if (r.kind == RuleKind::gridded) {
      any_gridded = true;
    } else {
      r.tau_lo = parse_double(row[3]);
      r.tau_hi = parse_double(row[4]);
    }
  }

  if (any_gridded) {
    if (!pol.grid) throw ArgumentError(path.string() + ": gridded rows need a '# grid=' header");
    const auto gpath = policy_grid_path(path);
    std::ifstream gin(gpath);
    if (!gin) throw ArgumentError("cannot open " + gpath.string());
    std::getline(gin, line);
    while (std::getline(gin, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto row = split(line, ',');
      if (row.size() != 4) throw ArgumentError(gpath.string() + ": rows need 4 columns");
      const int n = parse_int(row[0]);
      const int q = parse_int(row[1]);
      if (n < 1 || n > pol.horizon || q < 0 || q >= pol.num_states) throw ArgumentError(gpath.string() + ": index out of range");
      Rule& r = pol.rules[static_cast<size_t>((n - 1) * pol.num_states + q)];
      if (r.kind != RuleKind::gridded) throw ArgumentError(gpath.string() + ": grid row for a non-gridded rule");
      const int i = pol.grid->nearest_index(parse_double(row[2]));
      if (r.transmit.empty()) r.transmit.assign(static_cast<size_t>(pol.grid->size()), false);
      r.transmit[static_cast<size_t>(i)] = parse_int(row[3]) != 0;
    }
    for (const auto& r : pol.rules) {
      if (r.kind == RuleKind::gridded && r.transmit.size() != static_cast<size_t>(pol.grid->size())) {
        throw ArgumentError(gpath.string() + ": missing grid rows");
      }
    }
  }
  return file;
}

json summary_to_json(const SimSummary& s) {
  return {{"trials", s.trials},
          {"seed", s.seed},
          {"total", s.total},
          {"total_se", s.total_se},
          {"stage_mse", s.stage_mse},
          {"stage_se", s.stage_se},
          {"transmit_rate", s.transmit_rate},
          {"occupancy", s.occupancy}};
}

}  // namespace remest
