#pragma once

#include <optional>
#include <string>
#include <vector>

#include "remest/channel.hpp"
#include "remest/policy.hpp"
#include "remest/process.hpp"
#include "remest/quadrature.hpp"

namespace remest {

struct SolverSettings {
  std::optional<double> half_width;  ///< empty selects ErrorGrid::automatic
  int num_points = 2001;
  double cap_sigmas = 100.0;         ///< clip for the automatic half-width
  double value_cap = 1e12;

  [[nodiscard]] ErrorGrid make_grid(const PlantModel& plant) const;
};

/// Value functions of the symmetric-policy recursion on an error grid.
/// Stage n runs 1..N+1; C0/C1 and the transmit flags exist for 1..N.
/// C1 is absent at masked channel states.
struct ValueTable {
  PlantModel plant;
  ChannelFsm fsm;
  ErrorGrid grid{1.0, 3};
  std::vector<GridFunction> V;
  std::vector<GridFunction> C0;
  std::vector<std::optional<GridFunction>> C1;
  std::vector<std::vector<bool>> transmit;
  std::string provenance;

  [[nodiscard]] int horizon() const { return plant.horizon; }
  [[nodiscard]] int num_states() const { return fsm.num_states; }
  [[nodiscard]] size_t index(int n, State q) const;
  [[nodiscard]] const GridFunction& value(int n, State q) const { return V.at(index(n, q)); }
  GridFunction& value(int n, State q) { return V.at(index(n, q)); }
  /// Optimal total cost from (e = 0, initial state).
  [[nodiscard]] double initial_value() const { return value(1, fsm.initial_state).at_zero(); }
};

struct SymmetricSolution {
  ValueTable table;
  TransmitPolicy policy;  ///< gridded, aligned to StageAlignment::carried_error
};

/// Backward induction over (error grid x channel state), stages N..1.
/// Ties C0 == C1 resolve to silence. Throws NumericOverflowError when any value
/// exceeds `value_cap`.
SymmetricSolution backward_induction(const PlantModel& plant, const ChannelFsm& fsm, const ErrorGrid& grid,
                                     double value_cap = 1e12);

SymmetricSolution backward_induction(const PlantModel& plant, const ChannelFsm& fsm,
                                     const SolverSettings& settings);

struct StructureViolation {
  int n = 0;
  State q = 0;
  double e = 0.0;
  std::string what;
};

struct StructureReport {
  std::vector<StructureViolation> violations;
  int slices_checked = 0;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Every V_n(., q) symmetric and non-decreasing in |e| with its minimum at 0.
/// `rel_tol` is relative to each slice's value range.
StructureReport check_value_structure(const ValueTable& table, double rel_tol);

/// Curvature bounds v'_n = 2a^2(N + 1 - n) + a^2 for n = 1..N+1.
struct SlopeBound {
  std::vector<double> v_prime;  ///< index 0 is stage 1
  double v = 0.0;
  double threshold_condition = 1.0;

  [[nodiscard]] double at(int n) const { return v_prime.at(static_cast<size_t>(n - 1)); }
};

SlopeBound slope_bound(const PlantModel& plant);

struct SmallDropCondition {
  double v = 0.0;
  double threshold = 1.0;
  bool satisfied = false;
};

/// Sufficient condition for threshold optimality: every unmasked drop
/// probability below 1 / (1 + v).
SmallDropCondition small_drop_condition(const PlantModel& plant, const ChannelFsm& fsm);

struct QuotientViolation {
  int n = 0;
  State q = 0;
  double e = 0.0;
  double quotient = 0.0;
  double bound = 0.0;
};

struct CurvatureReport {
  std::vector<QuotientViolation> violations;
  std::vector<double> max_quotient;  ///< per stage, index 0 is stage 1
  long points_checked = 0;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Checks O_n(e, q) <= v'_n + slack on every grid e >= 0 whose smoothing window
/// stays inside the grid, for n = 1..N+1.
CurvatureReport check_curvature_bound(const ValueTable& table, double slack);

struct ThresholdReport {
  SymmetricSolution solution;
  std::vector<ThresholdResult> results;        ///< (n - 1) * m + q
  std::vector<std::vector<bool>> reachable;    ///< [n - 1][q]
  TransmitPolicy threshold_policy;             ///< thresholds, gridded where extraction failed
  int not_threshold = 0;
  int not_threshold_reachable = 0;

  [[nodiscard]] const ThresholdResult& result(int n, State q) const;
};

ThresholdReport solve_and_extract(const PlantModel& plant, const ChannelFsm& fsm, const ErrorGrid& grid,
                                  double value_cap = 1e12);

}  // namespace remest
