#pragma once

#include <cstdint>
#include <vector>

#include "remest/channel.hpp"

namespace remest {

// Desk-scale ground truth for the white-process problem: X_n is drawn i.i.d.
// from a finite support, the channel is an arbitrary FSM, and a policy maps
// (stage, channel state, support point) to {0, 1}. Estimates are the exact
// conditional means given the policy-induced partition.

struct SupportPoint {
  double value = 0.0;
  double prob = 0.0;
};

struct DiscreteInstance {
  std::vector<SupportPoint> support;  ///< sorted ascending by value
  ChannelFsm fsm;
  int horizon = 1;
  double enumeration_limit = 1e7;

  /// Sorts the support and validates probabilities and the FSM.
  DiscreteInstance(std::vector<SupportPoint> support, ChannelFsm fsm, int horizon, double enumeration_limit = 1e7);
};

/// Transmit subset per (stage, state) as a bitmask over support indices.
struct DiscretePolicy {
  int horizon = 0;
  int num_states = 0;
  std::vector<std::uint32_t> masks;  ///< (n - 1) * m + q; unreachable pairs are 0

  [[nodiscard]] std::uint32_t mask(int n, State q) const {
    return masks.at(static_cast<size_t>((n - 1) * num_states + q));
  }
};

/// Silent set is one contiguous run of support points (possibly empty or all).
bool is_interval_complement(std::uint32_t transmit_mask, int support_size);

/// Stage cost of a transmit subset for one channel state.
double discrete_stage_cost(const std::vector<SupportPoint>& support, std::uint32_t transmit_mask, double p_drop);

/// Number of policy combinations the exhaustive search would evaluate.
double enumeration_size(const DiscreteInstance& inst);

struct ExhaustiveResult {
  double optimal_cost = 0.0;
  std::vector<DiscretePolicy> minimizers;
  long evaluated = 0;
};

/// Evaluates every deterministic stage-wise policy over the reachable
/// (stage, state) pairs by walking the full outcome tree. Policies within
/// `tie_tol` (relative) of the minimum are all returned.
/// Throws EnumerationLimitError above the instance's limit.
ExhaustiveResult exhaustive_policy_search(const DiscreteInstance& inst, double tie_tol = 1e-12);

struct DiscreteDpResult {
  double value = 0.0;                 ///< optimal cost from the initial state
  std::vector<double> V;              ///< (n - 1) * m + q, n = 1..N+1
  DiscretePolicy policy;
};

/// Exact backward induction over channel states with per-state subset search.
DiscreteDpResult discrete_dp(const DiscreteInstance& inst);

/// Gaussian N(0, sigma2) quantized to the given points with cell masses
/// (cells split at midpoints).
std::vector<SupportPoint> quantized_gaussian(const std::vector<double>& points, double sigma2);

}  // namespace remest
