#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>

#include "remest/discrete.hpp"
#include "remest/dp_iid.hpp"
#include "remest/dp_symmetric.hpp"
#include "remest/errors.hpp"
#include "remest/simulate.hpp"

namespace py = pybind11;
using namespace remest;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Remote estimation over use-dependent packet-drop channels";

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<ForbiddenActionError>(m, "ForbiddenActionError", PyExc_RuntimeError);
  py::register_exception<DegenerateRegionError>(m, "DegenerateRegionError", PyExc_ArithmeticError);
  py::register_exception<NumericOverflowError>(m, "NumericOverflowError", PyExc_OverflowError);
  py::register_exception<EnumerationLimitError>(m, "EnumerationLimitError", PyExc_RuntimeError);

  py::class_<PlantModel>(m, "Plant")
      .def(py::init([](double a, double sigma2, int horizon, double x0) { return PlantModel{a, sigma2, x0, horizon}; }),
           py::arg("a"), py::arg("sigma2"), py::arg("horizon"), py::arg("x0") = 0.0)
      .def_readwrite("a", &PlantModel::a)
      .def_readwrite("sigma2", &PlantModel::sigma2)
      .def_readwrite("x0", &PlantModel::x0)
      .def_readwrite("horizon", &PlantModel::horizon)
      .def("open_loop_cost", &predicted_open_loop_cost);

  py::class_<ChannelFsm>(m, "Channel")
      .def_readonly("num_states", &ChannelFsm::num_states)
      .def_readonly("drop_probs", &ChannelFsm::drop_probs)
      .def_readonly("initial_state", &ChannelFsm::initial_state)
      .def_readonly("transmit_allowed", &ChannelFsm::transmit_allowed)
      .def("step", &step, py::arg("q"), py::arg("r"))
      .def("violations", [](const ChannelFsm& f) {
        std::vector<std::pair<int, std::string>> out;
        for (const auto& v : validate_fsm(f)) out.emplace_back(v.state, v.reason);
        return out;
      });

  m.def("energy_harvesting", &energy_harvesting_fsm, py::arg("capacity"), py::arg("tx_cost"), py::arg("p_tx"));
  m.def("workload_chain",
        [](int window, const std::vector<double>& p) { return workload_chain_fsm(window, p); },
        py::arg("window"), py::arg("drop_probs"));
  m.def("constant_channel", &constant_fsm, py::arg("p"));
  m.def("channel",
        [](const std::vector<std::pair<int, std::optional<int>>>& transitions, const std::vector<double>& drops,
           int initial_state, const std::vector<bool>& allowed) {
          ChannelFsm f;
          f.num_states = static_cast<int>(transitions.size());
          for (const auto& [q0, q1] : transitions) f.transitions.push_back({q0, q1});
          f.drop_probs = drops;
          f.initial_state = initial_state;
          f.transmit_allowed = allowed;
          return f;
        },
        py::arg("transitions"), py::arg("drop_probs"), py::arg("initial_state"), py::arg("transmit_allowed"));

  py::class_<ThresholdReport>(m, "SymmetricSolution")
      .def_property_readonly("value", [](const ThresholdReport& r) { return r.solution.table.initial_value(); })
      .def_property_readonly("grid",
                             [](const ThresholdReport& r) {
                               const auto& g = r.solution.table.grid;
                               std::vector<double> pts;
                               for (int i = 0; i < g.size(); ++i) pts.push_back(g.point(i));
                               return to_array(pts);
                             })
      .def("V", [](const ThresholdReport& r, int n, int q) { return to_array(r.solution.table.value(n, q).values()); },
           py::arg("n"), py::arg("q"))
      .def("threshold",
           [](const ThresholdReport& r, int n, int q) -> std::optional<double> {
             const auto& t = r.result(n, q);
             if (!t.is_threshold) return std::nullopt;
             return t.rule.tau();
           },
           py::arg("n"), py::arg("q"))
      .def_readonly("not_threshold_reachable", &ThresholdReport::not_threshold_reachable)
      .def_property_readonly("provenance", [](const ThresholdReport& r) { return r.solution.table.provenance; })
      .def("structure_ok",
           [](const ThresholdReport& r, double rel_tol) { return check_value_structure(r.solution.table, rel_tol).ok(); },
           py::arg("rel_tol") = 1e-8)
      .def("simulate",
           [](const ThresholdReport& r, long trials, std::uint64_t seed) {
             const auto& t = r.solution.table;
             const auto s = simulate(t.plant, t.fsm, r.threshold_policy, trials, seed);
             return py::make_tuple(s.total, s.total_se);
           },
           py::arg("trials"), py::arg("seed") = 1);

  m.def("solve_symmetric",
        [](const PlantModel& plant, const ChannelFsm& fsm, int num_points, std::optional<double> half_width) {
          SolverSettings s;
          s.num_points = num_points;
          s.half_width = half_width;
          return solve_and_extract(plant, fsm, s.make_grid(plant), s.value_cap);
        },
        py::arg("plant"), py::arg("channel"), py::arg("num_points") = 2001, py::arg("half_width") = py::none());

  m.def("iid_stage_cost",
        [](double sigma2, double p, double lo, double hi) { return iid_stage_cost(sigma2, p, lo, hi).cost; },
        py::arg("sigma2"), py::arg("p_drop"), py::arg("tau_lo"), py::arg("tau_hi"));
  m.def("optimize_interval",
        [](double sigma2, double p, double gap) {
          const auto o = optimize_interval(sigma2, p, gap);
          return py::make_tuple(o.tau_lo, o.tau_hi, o.objective);
        },
        py::arg("sigma2"), py::arg("p_drop"), py::arg("continuation_gap") = 0.0);
  m.def("solve_iid",
        [](const ChannelFsm& fsm, double sigma2, int horizon) {
          const auto t = iid_backward_induction(fsm, sigma2, horizon);
          py::dict d;
          d["value"] = t.initial_value();
          std::vector<std::tuple<int, int, double, double>> intervals;
          for (int n = 1; n <= horizon; ++n) {
            for (int q = 0; q < fsm.num_states; ++q) intervals.emplace_back(n, q, t.at(n, q).tau_lo, t.at(n, q).tau_hi);
          }
          d["intervals"] = intervals;
          d["asymmetric_pairs"] = t.asymmetry_log.size();
          return d;
        },
        py::arg("channel"), py::arg("sigma2"), py::arg("horizon"));

  m.def("simulate_uniform",
        [](const PlantModel& plant, const ChannelFsm& fsm, const std::string& rule, long trials, std::uint64_t seed) {
          Rule r = rule == "never" ? Rule::never() : rule == "always" ? Rule::always() : throw ArgumentError("rule must be 'never' or 'always'");
          const auto s = simulate(plant, fsm, uniform_policy(fsm, plant.horizon, r), trials, seed);
          return py::make_tuple(s.total, s.total_se);
        },
        py::arg("plant"), py::arg("channel"), py::arg("rule"), py::arg("trials"), py::arg("seed") = 1);

  m.def("discrete_check",
        [](const std::vector<std::pair<double, double>>& support, const ChannelFsm& fsm, int horizon) {
          std::vector<SupportPoint> pts;
          for (const auto& [v, p] : support) pts.push_back({v, p});
          const DiscreteInstance inst(pts, fsm, horizon);
          return py::make_tuple(discrete_dp(inst).value, exhaustive_policy_search(inst).optimal_cost);
        },
        py::arg("support"), py::arg("channel"), py::arg("horizon"));
}
