#include "remest/channel.hpp"

#include <algorithm>
#include <sstream>

#include "remest/errors.hpp"

namespace remest {

std::vector<FsmViolation> validate_fsm(const ChannelFsm& fsm) {
  std::vector<FsmViolation> out;
  const int m = fsm.num_states;
  if (m < 1) {
    out.push_back({-1, "num_states must be positive"});
    return out;
  }
  const auto sz = static_cast<size_t>(m);
  if (fsm.transitions.size() != sz) out.push_back({-1, "transitions length mismatch"});
  if (fsm.drop_probs.size() != sz) out.push_back({-1, "drop_probs length mismatch"});
  if (fsm.transmit_allowed.size() != sz) out.push_back({-1, "transmit_allowed length mismatch"});
  if (fsm.initial_state < 0 || fsm.initial_state >= m) out.push_back({-1, "initial state out of range"});
  if (!out.empty()) return out;

  auto valid = [m](State s) { return s >= 0 && s < m; };
  for (State q = 0; q < m; ++q) {
    const auto& t = fsm.transitions[static_cast<size_t>(q)];
    const double p = fsm.drop_probs[static_cast<size_t>(q)];
    const bool allowed = fsm.transmit_allowed[static_cast<size_t>(q)];
    if (!valid(t.on_silent)) out.push_back({q, "dangling transition (r=0)"});
    if (t.on_transmit && !valid(*t.on_transmit)) out.push_back({q, "dangling transition (r=1)"});
    if (allowed && !t.on_transmit) out.push_back({q, "transmit allowed but no r=1 transition"});
    if (!(p >= 0.0 && p <= 1.0)) out.push_back({q, "probability out of range"});
    if (!allowed && p != 1.0) out.push_back({q, "masked state must have drop probability 1"});
  }
  return out;
}

void require_valid(const ChannelFsm& fsm) {
  const auto v = validate_fsm(fsm);
  if (v.empty()) return;
  std::ostringstream msg;
  msg << "invalid channel FSM:";
  for (const auto& x : v) msg << " [state " << x.state << ": " << x.reason << "]";
  throw ArgumentError(msg.str());
}

State step(const ChannelFsm& fsm, State q, int r) {
  if (q < 0 || q >= fsm.num_states) throw ArgumentError("channel state out of range");
  const auto& t = fsm.transitions[static_cast<size_t>(q)];
  if (r == 0) return t.on_silent;
  if (!fsm.allowed(q) || !t.on_transmit) {
    throw ForbiddenActionError("transmission not allowed in channel state " + std::to_string(q));
  }
  return *t.on_transmit;
}

bool sample_drop(const ChannelFsm& fsm, State q, RngStream& rng) {
  return rng.uniform() >= fsm.drop(q);
}

ChannelFsm energy_harvesting_fsm(int capacity, int tx_cost, double p_tx) {
  if (tx_cost < 1 || capacity < tx_cost) {
    throw ArgumentError("energy_harvesting_fsm requires capacity >= tx_cost >= 1");
  }
  if (!(p_tx >= 0.0 && p_tx <= 1.0)) throw ArgumentError("p_tx must lie in [0, 1]");
  ChannelFsm fsm;
  fsm.num_states = capacity + 1;
  for (State q = 0; q <= capacity; ++q) {
    const bool can = q >= tx_cost;
    Transition t{std::min(q + 1, capacity), std::nullopt};
    if (can) t.on_transmit = q - tx_cost;
    fsm.transitions.push_back(t);
    fsm.drop_probs.push_back(can ? p_tx : 1.0);
    fsm.transmit_allowed.push_back(can);
  }
  fsm.initial_state = capacity;
  return fsm;
}

ChannelFsm workload_chain_fsm(int window, std::span<const double> drop_probs) {
  if (window < 1) throw ArgumentError("workload_chain_fsm requires window >= 1");
  if (drop_probs.size() != static_cast<size_t>(window) + 1) {
    throw ArgumentError("workload_chain_fsm needs window + 1 drop probabilities");
  }
  ChannelFsm fsm;
  fsm.num_states = window + 1;
  for (State i = 0; i <= window; ++i) {
    const double p = drop_probs[static_cast<size_t>(i)];
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("drop probability out of [0, 1]");
    fsm.transitions.push_back({std::max(i - 1, 0), std::min(i + 1, window)});
    fsm.drop_probs.push_back(p);
    fsm.transmit_allowed.push_back(true);
  }
  fsm.initial_state = 0;
  return fsm;
}

ChannelFsm constant_fsm(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("drop probability out of [0, 1]");
  ChannelFsm fsm;
  fsm.num_states = 1;
  fsm.transitions.push_back({0, 0});
  fsm.drop_probs.push_back(p);
  fsm.transmit_allowed.push_back(true);
  return fsm;
}

std::vector<std::vector<bool>> reachable_states(const ChannelFsm& fsm, int horizon) {
  const auto m = static_cast<size_t>(fsm.num_states);
  std::vector<std::vector<bool>> reach(static_cast<size_t>(std::max(horizon, 0)),
                                       std::vector<bool>(m, false));
  if (horizon < 1) return reach;
  reach[0][static_cast<size_t>(fsm.initial_state)] = true;
  for (size_t n = 1; n < reach.size(); ++n) {
    for (State q = 0; q < fsm.num_states; ++q) {
      if (!reach[n - 1][static_cast<size_t>(q)]) continue;
      const auto& t = fsm.transitions[static_cast<size_t>(q)];
      reach[n][static_cast<size_t>(t.on_silent)] = true;
      if (fsm.allowed(q) && t.on_transmit) reach[n][static_cast<size_t>(*t.on_transmit)] = true;
    }
  }
  return reach;
}

}  // namespace remest
