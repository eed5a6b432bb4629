#include "remest/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "remest/errors.hpp"
#include "remest/quadrature.hpp"

namespace remest {

DiscreteInstance::DiscreteInstance(std::vector<SupportPoint> support_, ChannelFsm fsm_, int horizon_,
                                   double enumeration_limit_)
    : support(std::move(support_)), fsm(std::move(fsm_)), horizon(horizon_), enumeration_limit(enumeration_limit_) {
  require_valid(fsm);
  if (horizon < 1) throw ArgumentError("horizon must be at least 1");
  if (support.empty() || support.size() > 20) throw ArgumentError("support needs 1..20 points");
  double total = 0.0;
  for (const auto& s : support) {
    if (!(s.prob >= 0.0)) throw ArgumentError("negative support probability");
    total += s.prob;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("support probabilities must sum to 1");
  std::sort(support.begin(), support.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
}

bool is_interval_complement(std::uint32_t transmit_mask, int support_size) {
  int first = -1, last = -1;
  for (int i = 0; i < support_size; ++i) {
    if (!(transmit_mask >> i & 1u)) {
      if (first < 0) first = i;
      last = i;
    }
  }
  for (int i = first + 1; i < last; ++i) {
    if (transmit_mask >> i & 1u) return false;
  }
  return true;
}

namespace {

struct SplitMeans {
  double silent = 0.0;
  double attempted = 0.0;
};

SplitMeans split_means(const std::vector<SupportPoint>& support, std::uint32_t mask) {
  double w0 = 0.0, s0 = 0.0, w1 = 0.0, s1 = 0.0;
  for (size_t i = 0; i < support.size(); ++i) {
    if (mask >> i & 1u) {
      w1 += support[i].prob;
      s1 += support[i].prob * support[i].value;
    } else {
      w0 += support[i].prob;
      s0 += support[i].prob * support[i].value;
    }
  }
  return {w0 > 0.0 ? s0 / w0 : 0.0, w1 > 0.0 ? s1 / w1 : 0.0};
}

double transmit_mass(const std::vector<SupportPoint>& support, std::uint32_t mask) {
  double w = 0.0;
  for (size_t i = 0; i < support.size(); ++i) {
    if (mask >> i & 1u) w += support[i].prob;
  }
  return w;
}

std::uint32_t mask_count(const DiscreteInstance& inst) { return 1u << inst.support.size(); }

// Expected cost from (n, q) by explicit enumeration of every (x, drop) branch.
double walk_tree(const DiscreteInstance& inst, const std::vector<std::uint32_t>& masks,
                 const std::vector<SplitMeans>& means, int n, State q) {
  if (n > inst.horizon) return 0.0;
  const int m = inst.fsm.num_states;
  const auto idx = static_cast<size_t>((n - 1) * m + q);
  const std::uint32_t mask = masks[idx];
  const auto& t = inst.fsm.transitions[static_cast<size_t>(q)];
  const double p = inst.fsm.drop(q);
  double cost = 0.0;
  for (size_t i = 0; i < inst.support.size(); ++i) {
    const auto& s = inst.support[i];
    if (mask >> i & 1u) {
      const double d = s.value - means[idx].attempted;
      const double future = walk_tree(inst, masks, means, n + 1, *t.on_transmit);
      // drop branch, then delivery branch
      cost += s.prob * (p * (d * d + future) + (1.0 - p) * (0.0 + future));
    } else {
      const double d = s.value - means[idx].silent;
      cost += s.prob * (d * d + walk_tree(inst, masks, means, n + 1, t.on_silent));
    }
  }
  return cost;
}

}  // namespace

double discrete_stage_cost(const std::vector<SupportPoint>& support, std::uint32_t transmit_mask, double p_drop) {
  const auto mu = split_means(support, transmit_mask);
  double c0 = 0.0, c1 = 0.0;
  for (size_t i = 0; i < support.size(); ++i) {
    if (transmit_mask >> i & 1u) {
      const double d = support[i].value - mu.attempted;
      c1 += support[i].prob * d * d;
    } else {
      const double d = support[i].value - mu.silent;
      c0 += support[i].prob * d * d;
    }
  }
  return c0 + p_drop * c1;
}

double enumeration_size(const DiscreteInstance& inst) {
  const auto reach = reachable_states(inst.fsm, inst.horizon);
  double size = 1.0;
  for (const auto& stage : reach) {
    for (State q = 0; q < inst.fsm.num_states; ++q) {
      if (stage[static_cast<size_t>(q)] && inst.fsm.allowed(q)) size *= static_cast<double>(mask_count(inst));
    }
  }
  return size;
}

ExhaustiveResult exhaustive_policy_search(const DiscreteInstance& inst, double tie_tol) {
  const double size = enumeration_size(inst);
  if (size > inst.enumeration_limit) {
    throw EnumerationLimitError("exhaustive search needs " + std::to_string(size) + " policies");
  }
  const int m = inst.fsm.num_states;
  const auto reach = reachable_states(inst.fsm, inst.horizon);
  std::vector<size_t> free_slots;
  for (int n = 1; n <= inst.horizon; ++n) {
    for (State q = 0; q < m; ++q) {
      if (reach[static_cast<size_t>(n - 1)][static_cast<size_t>(q)] && inst.fsm.allowed(q)) {
        free_slots.push_back(static_cast<size_t>((n - 1) * m + q));
      }
    }
  }
  const std::uint32_t radix = mask_count(inst);
  std::vector<std::uint32_t> masks(static_cast<size_t>(inst.horizon * m), 0u);
  std::vector<SplitMeans> means(masks.size(), split_means(inst.support, 0u));

  ExhaustiveResult res;
  res.optimal_cost = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, std::vector<std::uint32_t>>> near;
  auto within = [&](double c, double ref) { return std::abs(c - ref) <= tie_tol * std::max(1.0, std::abs(ref)); };

  while (true) {
    for (size_t s : free_slots) means[s] = split_means(inst.support, masks[s]);
    const double cost = walk_tree(inst, masks, means, 1, inst.fsm.initial_state);
    ++res.evaluated;
    if (cost < res.optimal_cost) {
      res.optimal_cost = cost;
      std::erase_if(near, [&](const auto& e) { return !within(e.first, cost); });
    }
    if (within(cost, res.optimal_cost)) near.emplace_back(cost, masks);

    size_t k = 0;
    for (; k < free_slots.size(); ++k) {
      if (++masks[free_slots[k]] < radix) break;
      masks[free_slots[k]] = 0;
    }
    if (k == free_slots.size()) break;
  }
  for (auto& [c, mk] : near) {
    if (within(c, res.optimal_cost)) res.minimizers.push_back({inst.horizon, m, std::move(mk)});
  }
  return res;
}

DiscreteDpResult discrete_dp(const DiscreteInstance& inst) {
  const int m = inst.fsm.num_states;
  const int N = inst.horizon;
  DiscreteDpResult res;
  res.V.assign(static_cast<size_t>((N + 1) * m), 0.0);
  res.policy = {N, m, std::vector<std::uint32_t>(static_cast<size_t>(N * m), 0u)};
  const std::uint32_t radix = mask_count(inst);
  auto V = [&](int n, State q) -> double& { return res.V[static_cast<size_t>((n - 1) * m + q)]; };

  for (int n = N; n >= 1; --n) {
    for (State q = 0; q < m; ++q) {
      const auto& t = inst.fsm.transitions[static_cast<size_t>(q)];
      const double v0 = V(n + 1, t.on_silent);
      const double p = inst.fsm.drop(q);
      double best = discrete_stage_cost(inst.support, 0u, p) + v0;
      std::uint32_t best_mask = 0u;
      if (inst.fsm.allowed(q)) {
        const double v1 = V(n + 1, *t.on_transmit);
        for (std::uint32_t mask = 1; mask < radix; ++mask) {
          const double w = transmit_mass(inst.support, mask);
          const double c = discrete_stage_cost(inst.support, mask, p) + w * v1 + (1.0 - w) * v0;
          if (c < best) {
            best = c;
            best_mask = mask;
          }
        }
      }
      V(n, q) = best;
      res.policy.masks[static_cast<size_t>((n - 1) * m + q)] = best_mask;
    }
  }
  res.value = V(1, inst.fsm.initial_state);
  return res;
}

std::vector<SupportPoint> quantized_gaussian(const std::vector<double>& points, double sigma2) {
  if (points.empty()) throw ArgumentError("quantized_gaussian needs points");
  std::vector<double> pts = points;
  std::sort(pts.begin(), pts.end());
  const double s = std::sqrt(sigma2);
  std::vector<SupportPoint> out;
  double prev_cdf = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double cdf = i + 1 < pts.size() ? normal_cdf(0.5 * (pts[i] + pts[i + 1]) / s) : 1.0;
    out.push_back({pts[i], cdf - prev_cdf});
    prev_cdf = cdf;
  }
  return out;
}

}  // namespace remest
