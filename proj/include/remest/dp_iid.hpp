#pragma once

#include <vector>

#include "remest/channel.hpp"
#include "remest/policy.hpp"

namespace remest {

// Solver for the white-process case (a = 0). The per-stage decision is an
// interval rule on X_n ~ N(0, sigma2): silent on [tau_lo, tau_hi], attempt
// outside. tau_lo == tau_hi encodes the empty silent region.

struct StageCost {
  double cost = 0.0;
  double p_transmit = 0.0;
};

/// Expected squared error of one stage with conditional-mean estimates for the
/// silent and attempted-but-dropped outcomes.
StageCost iid_stage_cost(double sigma2, double p_drop, double tau_lo, double tau_hi);

/// E[X | silent] and E[X | attempted]. Throws DegenerateRegionError when the
/// corresponding region has no mass.
struct ConditionalEstimates {
  double silent = 0.0;
  double attempted = 0.0;
};
ConditionalEstimates conditional_estimates(double sigma2, double tau_lo, double tau_hi);

struct SearchSettings {
  int coarse_points = 121;     ///< per axis, over [-span, span] sigma
  double span_sigmas = 6.0;
  double tolerance = 1e-6;     ///< refinement step floor, in units of sigma
};

struct IntervalOptimum {
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  double objective = 0.0;
  double p_transmit = 0.0;

  [[nodiscard]] Rule rule() const;
};

/// Minimizes stage cost + p_transmit * continuation_gap over interval rules.
IntervalOptimum optimize_interval(double sigma2, double p_drop, double continuation_gap,
                                  const SearchSettings& settings = {});

/// Same objective restricted to tau_lo = -tau_hi.
IntervalOptimum optimize_symmetric_interval(double sigma2, double p_drop, double continuation_gap,
                                            const SearchSettings& settings = {});

struct AsymmetryEntry {
  int n = 0;
  State q = 0;
  double symmetric_objective = 0.0;
  double objective = 0.0;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
};

struct IidValueTable {
  int horizon = 0;
  int num_states = 0;
  double sigma2 = 1.0;
  State initial_state = 0;
  std::vector<double> V;                 ///< (n - 1) * m + q for n = 1..N+1
  std::vector<IntervalOptimum> optimum;  ///< (n - 1) * m + q for n = 1..N
  std::vector<double> symmetric_objective;
  std::vector<bool> masked;
  std::vector<AsymmetryEntry> asymmetry_log;

  [[nodiscard]] double value(int n, State q) const;
  [[nodiscard]] const IntervalOptimum& at(int n, State q) const;
  [[nodiscard]] double initial_value() const { return value(1, initial_state); }
  /// Interval-pair policy aligned to StageAlignment::current_sample.
  [[nodiscard]] TransmitPolicy policy() const;
};

/// Improvements smaller than this (times sigma2) are not logged as asymmetric.
inline constexpr double kAsymmetryTolerance = 1e-9;

IidValueTable iid_backward_induction(const ChannelFsm& fsm, double sigma2, int horizon,
                                     const SearchSettings& settings = {});

}  // namespace remest
