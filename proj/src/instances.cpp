#include "remest/instances.hpp"

#include <algorithm>
#include <cmath>

namespace remest {

namespace {

int uniform_int(RngStream& rng, int lo, int hi) {
  return lo + std::min(hi - lo, static_cast<int>(rng.uniform() * (hi - lo + 1)));
}

}  // namespace

ChannelFsm random_fsm(RngStream& rng, int num_states, double p_max, double mask_prob) {
  ChannelFsm fsm;
  fsm.num_states = num_states;
  std::vector<bool> masked(static_cast<size_t>(num_states));
  bool any_open = false;
  for (auto&& b : masked) {
    b = rng.uniform() < mask_prob;
    any_open = any_open || !b;
  }
  if (!any_open) masked[static_cast<size_t>(uniform_int(rng, 0, num_states - 1))] = false;
  for (State q = 0; q < num_states; ++q) {
    const bool open = !masked[static_cast<size_t>(q)];
    Transition t{uniform_int(rng, 0, num_states - 1), std::nullopt};
    if (open) t.on_transmit = uniform_int(rng, 0, num_states - 1);
    fsm.transitions.push_back(t);
    fsm.drop_probs.push_back(open ? rng.uniform() * p_max : 1.0);
    fsm.transmit_allowed.push_back(open);
  }
  fsm.initial_state = uniform_int(rng, 0, num_states - 1);
  return fsm;
}

SmallDropInstance random_small_drop_instance(RngStream& rng, int max_states, int max_horizon) {
  SmallDropInstance inst;
  inst.plant.a = 0.5 + 0.7 * rng.uniform();
  inst.plant.sigma2 = 1.0;
  inst.plant.horizon = uniform_int(rng, 1, max_horizon);
  const double a2 = inst.plant.a * inst.plant.a;
  const double p_max = 1.0 / (1.0 + 2.0 * a2 * inst.plant.horizon + a2);
  inst.fsm = random_fsm(rng, uniform_int(rng, 1, max_states), p_max);
  return inst;
}

DiscreteInstance random_discrete_instance(RngStream& rng) {
  const int k = uniform_int(rng, 1, 5);
  std::vector<SupportPoint> support;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    // Distinct values on a coarse lattice keep the instance well posed.
    support.push_back({std::round((rng.uniform() * 6.0 - 3.0) * 8.0) / 8.0 + 1e-3 * i, 0.05 + rng.uniform()});
    total += support.back().prob;
  }
  for (auto& s : support) s.prob /= total;
  double sum = 0.0;
  for (size_t i = 0; i + 1 < support.size(); ++i) sum += support[i].prob;
  support.back().prob = 1.0 - sum;
  ChannelFsm fsm = random_fsm(rng, uniform_int(rng, 1, 3), 1.0, 0.25);
  return {std::move(support), std::move(fsm), uniform_int(rng, 1, 2)};
}

GridFunction random_symmetric_step(RngStream& rng, const ErrorGrid& grid, int max_steps) {
  const int steps = uniform_int(rng, 1, max_steps);
  std::vector<double> cuts, jumps;
  for (int s = 0; s < steps; ++s) {
    cuts.push_back(rng.uniform() * grid.half_width());
    jumps.push_back(rng.uniform() * 5.0);
  }
  const double base = rng.uniform();
  return GridFunction::sample(grid, [&](double e) {
    double v = base;
    for (size_t s = 0; s < cuts.size(); ++s) {
      if (std::abs(e) > cuts[s]) v += jumps[s];
    }
    return v;
  });
}

}  // namespace remest
