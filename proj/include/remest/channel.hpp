#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remest/rng.hpp"

namespace remest {

/// Channel state index. States are contiguous, 0-based.
using State = int;

struct Transition {
  State on_silent = 0;                 ///< next state when R = 0
  std::optional<State> on_transmit;    ///< next state when R = 1; empty iff masked
};

/// Use-dependent packet-drop channel: a finite state machine whose state is
/// driven by the transmit decisions and selects the drop probability.
struct ChannelFsm {
  int num_states = 0;
  std::vector<Transition> transitions;
  std::vector<double> drop_probs;
  State initial_state = 0;
  std::vector<bool> transmit_allowed;

  [[nodiscard]] bool allowed(State q) const { return transmit_allowed.at(static_cast<size_t>(q)); }
  [[nodiscard]] double drop(State q) const { return drop_probs.at(static_cast<size_t>(q)); }
};

/// What the estimator observes after one channel use.
struct ChannelOutcome {
  bool attempted = false;
  bool success = false;
  bool delivered = false;
  std::optional<double> payload;  ///< empty is the erasure symbol

  static ChannelOutcome make(bool attempted, bool success, double z) {
    ChannelOutcome out{attempted, success, attempted && success, std::nullopt};
    if (out.delivered) out.payload = z;
    return out;
  }
};

struct FsmViolation {
  State state = -1;  ///< -1 for FSM-wide problems
  std::string reason;
};

/// Every invariant violation of `fsm`; empty means the FSM is valid.
std::vector<FsmViolation> validate_fsm(const ChannelFsm& fsm);

/// Throws ArgumentError listing the violations if `fsm` is invalid.
void require_valid(const ChannelFsm& fsm);

/// Next channel state. Throws ForbiddenActionError on r = 1 at a masked state.
State step(const ChannelFsm& fsm, State q, int r);

/// True when an attempted transmission gets through. Consumes one uniform draw.
bool sample_drop(const ChannelFsm& fsm, State q, RngStream& rng);

/// Battery with deterministic harvesting of one unit per silent step.
ChannelFsm energy_harvesting_fsm(int capacity, int tx_cost, double p_tx);

/// Workload count chain: state i counts recent requests, saturating at k.
ChannelFsm workload_chain_fsm(int window, std::span<const double> drop_probs);

/// Single-state channel with drop probability p.
ChannelFsm constant_fsm(double p);

/// For each stage n in 1..horizon, which states can be occupied starting from
/// the initial state under some admissible action sequence. Index 0 is stage 1.
std::vector<std::vector<bool>> reachable_states(const ChannelFsm& fsm, int horizon);

}  // namespace remest
