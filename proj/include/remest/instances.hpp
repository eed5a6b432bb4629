#pragma once

#include <vector>

#include "remest/channel.hpp"
#include "remest/discrete.hpp"
#include "remest/process.hpp"
#include "remest/quadrature.hpp"
#include "remest/rng.hpp"

namespace remest {

// Seeded random instances shared by the verify command and the test suites.

/// Random FSM with `num_states` states. Each state is masked with probability
/// `mask_prob` (never all of them); unmasked drop probabilities are uniform on
/// [0, p_max).
ChannelFsm random_fsm(RngStream& rng, int num_states, double p_max, double mask_prob = 0.2);

struct SmallDropInstance {
  PlantModel plant;
  ChannelFsm fsm;
};

/// m <= max_states, a in [0.5, 1.2], N <= max_horizon, every unmasked drop
/// probability strictly below 1 / (1 + 2a^2 N + a^2).
SmallDropInstance random_small_drop_instance(RngStream& rng, int max_states = 5, int max_horizon = 10);

/// <= 5 support points, <= 3 channel states, N <= 2.
DiscreteInstance random_discrete_instance(RngStream& rng);

/// Symmetric step function, non-decreasing in |e|, with up to `max_steps` jumps.
GridFunction random_symmetric_step(RngStream& rng, const ErrorGrid& grid, int max_steps = 6);

}  // namespace remest
