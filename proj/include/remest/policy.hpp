#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "remest/channel.hpp"
#include "remest/quadrature.hpp"

namespace remest {

// Orientation convention: a rule names the SILENT region. The encoder transmits
// iff the error lies outside [tau_lo, tau_hi] (symmetric: iff |e| > tau).

enum class RuleKind {
  gridded,              ///< explicit transmit flag per grid point, nearest-point lookup
  symmetric_threshold,  ///< silent on [-tau, tau]; tau = +inf means never transmit
  interval_pair,        ///< silent on [tau_lo, tau_hi]; infinite ends allowed
  always_transmit,      ///< empty silent region; reported as tau = 0
};

struct Rule {
  RuleKind kind = RuleKind::symmetric_threshold;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  std::vector<bool> transmit;  ///< gridded only

  static Rule symmetric(double tau) { return {RuleKind::symmetric_threshold, -tau, tau, {}}; }
  static Rule interval(double lo, double hi) { return {RuleKind::interval_pair, lo, hi, {}}; }
  static Rule never() { return symmetric(std::numeric_limits<double>::infinity()); }
  static Rule always() { return {RuleKind::always_transmit, 0.0, 0.0, {}}; }

  [[nodiscard]] double tau() const { return tau_hi; }
  [[nodiscard]] bool is_never() const;
  [[nodiscard]] bool is_symmetric(double tol = 0.0) const;
};

/// How policy stage n lines up with process time.
///  - carried_error: stage n acts on the error carried into time n-1, as in the
///    symmetric value recursion V_n(e_{n-1}, q_n); stage 1 sees e = 0 and the
///    final time N has no transmission opportunity.
///  - current_sample: stage n acts on the pre-transmission error at time n.
enum class StageAlignment { carried_error, current_sample };

struct TransmitPolicy {
  RuleKind kind = RuleKind::symmetric_threshold;  ///< dominant rule family
  bool symmetric = true;
  StageAlignment alignment = StageAlignment::current_sample;
  int horizon = 0;
  int num_states = 0;
  std::vector<bool> masked;        ///< per channel state
  std::optional<ErrorGrid> grid;   ///< required when any rule is gridded
  std::vector<Rule> rules;         ///< row-major (n - 1) * num_states + q

  [[nodiscard]] const Rule& rule(int n, State q) const;
  Rule& rule(int n, State q);
};

/// Policy with one rule everywhere; masked states are forced to never-transmit.
TransmitPolicy uniform_policy(const ChannelFsm& fsm, int horizon, const Rule& rule,
                              StageAlignment alignment = StageAlignment::current_sample);

/// Action in {0, 1}. Always 0 at masked states.
int decide(const TransmitPolicy& policy, int n, State q, double e);

/// Action for a single rule (no masking); `grid` is needed for gridded rules.
int decide(const Rule& rule, double e, const ErrorGrid* grid = nullptr);

struct TransmitSet {
  ErrorGrid grid;
  std::vector<bool> transmit;
};

struct ThresholdResult {
  bool is_threshold = false;
  Rule rule;                                  ///< valid when is_threshold
  std::optional<std::array<double, 3>> witness;  ///< e1 < e2 < e3: silent, transmit, silent
  std::string reason;
};

/// Recovers an interval rule from a gridded transmit set. Boundaries sit at
/// midpoints between grid points; a silent run touching the grid edge extends
/// to infinity. With `symmetric`, the silent run must be centred on 0 within
/// one grid spacing.
ThresholdResult extract_threshold(const TransmitSet& set, bool symmetric);

}  // namespace remest
