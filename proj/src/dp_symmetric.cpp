#include "remest/dp_symmetric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "remest/errors.hpp"
#include "remest/io.hpp"

namespace remest {

ErrorGrid SolverSettings::make_grid(const PlantModel& plant) const {
  if (half_width) return {*half_width, num_points};
  return ErrorGrid::automatic(plant, num_points, cap_sigmas);
}

size_t ValueTable::index(int n, State q) const {
  if (n < 1 || n > horizon() + 1 || q < 0 || q >= num_states()) throw ArgumentError("value table index out of range");
  return static_cast<size_t>((n - 1) * num_states() + q);
}

namespace {

void check_cap(const GridFunction& f, double cap, int n, State q) {
  for (double v : f.values()) {
    if (!std::isfinite(v) || std::abs(v) > cap) {
      throw NumericOverflowError("value function exceeds cap at stage " + std::to_string(n) + ", state " +
                                 std::to_string(q) + "; widen the grid or lower the horizon");
    }
  }
}

}  // namespace

SymmetricSolution backward_induction(const PlantModel& plant, const ChannelFsm& fsm, const ErrorGrid& grid,
                                     double value_cap) {
  require_valid(plant);
  require_valid(fsm);
  const int N = plant.horizon;
  const int m = fsm.num_states;
  const auto sz = static_cast<size_t>(grid.size());
  const GaussianSmoother smoother(grid, plant.a, plant.sigma2);

  std::vector<double> e2(sz);
  for (size_t i = 0; i < sz; ++i) e2[i] = grid.point(static_cast<int>(i)) * grid.point(static_cast<int>(i));

  // Stages are produced backwards and reversed at the end.
  std::vector<std::vector<GridFunction>> V_rev;
  std::vector<std::vector<GridFunction>> C0_rev;
  std::vector<std::vector<std::optional<GridFunction>>> C1_rev;
  std::vector<std::vector<std::vector<bool>>> tx_rev;

  V_rev.emplace_back(static_cast<size_t>(m), GridFunction(grid, e2));

  for (int n = N; n >= 1; --n) {
    const auto& next = V_rev.back();
    std::vector<GridFunction> h;
    std::vector<double> h_zero;
    h.reserve(static_cast<size_t>(m));
    for (State q = 0; q < m; ++q) {
      h.push_back(smoother.apply(next[static_cast<size_t>(q)]));
      h_zero.push_back(h.back().at_zero());
    }

    std::vector<GridFunction> V_n, C0_n;
    std::vector<std::optional<GridFunction>> C1_n;
    std::vector<std::vector<bool>> tx_n;
    for (State q = 0; q < m; ++q) {
      const auto& t = fsm.transitions[static_cast<size_t>(q)];
      const auto& h0 = h[static_cast<size_t>(t.on_silent)];
      std::vector<double> c0(sz);
      for (size_t i = 0; i < sz; ++i) c0[i] = e2[i] + h0[i];
      GridFunction C0(grid, c0);

      if (!fsm.allowed(q)) {
        V_n.push_back(C0);
        C0_n.push_back(std::move(C0));
        C1_n.emplace_back(std::nullopt);
        tx_n.emplace_back(sz, false);
        check_cap(V_n.back(), value_cap, n, q);
        continue;
      }

      const double p = fsm.drop(q);
      const auto q1 = static_cast<size_t>(*t.on_transmit);
      const auto& h1 = h[q1];
      const double delivered_tail = (1.0 - p) * h_zero[q1];
      std::vector<double> c1(sz), v(sz);
      std::vector<bool> tx(sz);
      for (size_t i = 0; i < sz; ++i) {
        c1[i] = p * e2[i] + p * h1[i] + delivered_tail;
        tx[i] = c1[i] < c0[i];
        v[i] = tx[i] ? c1[i] : c0[i];
      }
      V_n.emplace_back(grid, std::move(v));
      check_cap(V_n.back(), value_cap, n, q);
      C0_n.push_back(std::move(C0));
      C1_n.emplace_back(GridFunction(grid, std::move(c1)));
      tx_n.push_back(std::move(tx));
    }
    V_rev.push_back(std::move(V_n));
    C0_rev.push_back(std::move(C0_n));
    C1_rev.push_back(std::move(C1_n));
    tx_rev.push_back(std::move(tx_n));
  }

  SymmetricSolution sol;
  auto& tab = sol.table;
  tab.plant = plant;
  tab.fsm = fsm;
  tab.grid = grid;
  tab.provenance = provenance_hash(plant, fsm) + ":" + settings_hash(grid, value_cap);
  for (auto it = V_rev.rbegin(); it != V_rev.rend(); ++it) {
    for (auto& f : *it) tab.V.push_back(std::move(f));
  }
  for (auto it = C0_rev.rbegin(); it != C0_rev.rend(); ++it) {
    for (auto& f : *it) tab.C0.push_back(std::move(f));
  }
  for (auto it = C1_rev.rbegin(); it != C1_rev.rend(); ++it) {
    for (auto& f : *it) tab.C1.push_back(std::move(f));
  }
  for (auto it = tx_rev.rbegin(); it != tx_rev.rend(); ++it) {
    for (auto& f : *it) tab.transmit.push_back(std::move(f));
  }

  auto& pol = sol.policy;
  pol.kind = RuleKind::gridded;
  pol.symmetric = true;
  pol.alignment = StageAlignment::carried_error;
  pol.horizon = N;
  pol.num_states = m;
  pol.grid = grid;
  for (State q = 0; q < m; ++q) pol.masked.push_back(!fsm.allowed(q));
  for (const auto& tx : tab.transmit) pol.rules.push_back(Rule{RuleKind::gridded, 0.0, 0.0, tx});
  return sol;
}

SymmetricSolution backward_induction(const PlantModel& plant, const ChannelFsm& fsm,
                                     const SolverSettings& settings) {
  return backward_induction(plant, fsm, settings.make_grid(plant), settings.value_cap);
}

StructureReport check_value_structure(const ValueTable& table, double rel_tol) {
  StructureReport rep;
  for (int n = 1; n <= table.horizon() + 1; ++n) {
    for (State q = 0; q < table.num_states(); ++q) {
      const auto& f = table.value(n, q);
      const double tol = range_tolerance(f, rel_tol);
      ++rep.slices_checked;
      const auto shape = is_symmetric_nondecreasing(f, tol);
      if (!shape.ok) rep.violations.push_back({n, q, shape.e, shape.what});
      const auto mn = std::min_element(f.values().begin(), f.values().end());
      if (*mn < f.at_zero() - tol) {
        const auto i = static_cast<int>(mn - f.values().begin());
        rep.violations.push_back({n, q, table.grid.point(i), "minimum not at e = 0"});
      }
    }
  }
  return rep;
}

SlopeBound slope_bound(const PlantModel& plant) {
  SlopeBound b;
  const double a2 = plant.a * plant.a;
  const int N = plant.horizon;
  for (int n = 1; n <= N + 1; ++n) b.v_prime.push_back(2.0 * a2 * (N + 1 - n) + a2);
  b.v = b.v_prime.front();
  b.threshold_condition = 1.0 / (1.0 + b.v);
  return b;
}

SmallDropCondition small_drop_condition(const PlantModel& plant, const ChannelFsm& fsm) {
  const auto b = slope_bound(plant);
  SmallDropCondition c{b.v, b.threshold_condition, true};
  for (State q = 0; q < fsm.num_states; ++q) {
    if (fsm.allowed(q) && !(fsm.drop(q) < c.threshold)) c.satisfied = false;
  }
  return c;
}

CurvatureReport check_curvature_bound(const ValueTable& table, double slack) {
  CurvatureReport rep;
  const auto bound = slope_bound(table.plant);
  const GaussianSmoother smoother(table.grid, table.plant.a, table.plant.sigma2);
  const double limit = smoother.interior_limit();
  const int r = table.grid.radius();
  for (int n = 1; n <= table.horizon() + 1; ++n) {
    double stage_max = -std::numeric_limits<double>::infinity();
    for (State q = 0; q < table.num_states(); ++q) {
      const auto h = smoother.apply(table.value(n, q));
      for (int i = r; i + 1 < table.grid.size(); ++i) {
        if (table.grid.point(i + 1) > limit) break;
        const double e = table.grid.point(i);
        const double quotient = directional_difference_quotient(h, e);
        ++rep.points_checked;
        stage_max = std::max(stage_max, quotient);
        if (quotient > bound.at(n) + slack) rep.violations.push_back({n, q, e, quotient, bound.at(n)});
      }
    }
    rep.max_quotient.push_back(stage_max);
  }
  return rep;
}

const ThresholdResult& ThresholdReport::result(int n, State q) const {
  return results.at(solution.table.index(n, q));
}

ThresholdReport solve_and_extract(const PlantModel& plant, const ChannelFsm& fsm, const ErrorGrid& grid,
                                  double value_cap) {
  ThresholdReport rep{backward_induction(plant, fsm, grid, value_cap), {}, {}, {}, 0, 0};
  const auto& tab = rep.solution.table;
  rep.reachable = reachable_states(fsm, plant.horizon);
  rep.threshold_policy = rep.solution.policy;
  auto& pol = rep.threshold_policy;
  pol.kind = RuleKind::symmetric_threshold;
  bool any_gridded = false;
  for (int n = 1; n <= plant.horizon; ++n) {
    for (State q = 0; q < fsm.num_states; ++q) {
      const size_t idx = tab.index(n, q);
      auto res = extract_threshold({grid, tab.transmit[idx]}, true);
      if (res.is_threshold) {
        pol.rules[idx] = res.rule;
      } else {
        any_gridded = true;
        ++rep.not_threshold;
        if (rep.reachable[static_cast<size_t>(n - 1)][static_cast<size_t>(q)]) ++rep.not_threshold_reachable;
      }
      rep.results.push_back(std::move(res));
    }
  }
  if (!any_gridded) pol.grid.reset();
  return rep;
}

}  // namespace remest
