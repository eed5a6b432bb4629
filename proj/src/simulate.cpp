#include "remest/simulate.hpp"

#include <cmath>

#include "remest/dp_iid.hpp"
#include "remest/errors.hpp"
#include "remest/rng.hpp"

namespace remest {

double pairwise_sum(const double* first, size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += first[i];
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum(first, half) + pairwise_sum(first + half, n - half);
}

namespace {

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  const double mean = pairwise_sum(xs.data(), xs.size()) / n;
  std::vector<double> dev(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - mean) * (xs[i] - mean);
  const double var = xs.size() > 1 ? pairwise_sum(dev.data(), dev.size()) / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

bool uses_interval_estimator(const PlantModel& plant, const Rule& rule) {
  return plant.a == 0.0 && rule.kind == RuleKind::interval_pair;
}

void require_simulable(const PlantModel& plant, const ChannelFsm& fsm, const TransmitPolicy& policy) {
  require_valid(plant);
  require_valid(fsm);
  if (policy.horizon != plant.horizon) throw ArgumentError("policy horizon does not match the plant");
  if (policy.num_states != fsm.num_states) throw ArgumentError("policy does not match the channel state count");
  if (policy.symmetric) return;
  if (plant.a != 0.0) {
    throw ArgumentError("asymmetric policies can only be simulated for a = 0 (no tractable estimator otherwise)");
  }
  for (const auto& r : policy.rules) {
    if (r.kind == RuleKind::gridded && !r.is_symmetric()) {
      throw ArgumentError("asymmetric gridded rules are not supported by the simulator");
    }
  }
}

}  // namespace

SimSummary simulate(const PlantModel& plant, const ChannelFsm& fsm, const TransmitPolicy& policy, long trials,
                    std::uint64_t seed, std::vector<TraceRow>* trace, long trace_trials) {
  if (trials <= 0) throw ArgumentError("trials must be positive");
  require_simulable(plant, fsm, policy);

  const int N = plant.horizon;
  const int m = fsm.num_states;
  const double sigma = plant.sigma();
  const bool carried = policy.alignment == StageAlignment::carried_error;

  // Conditional means per (stage, state) for interval rules at a = 0.
  std::vector<ConditionalEstimates> cond(static_cast<size_t>(N * m));
  for (int n = 1; n <= N; ++n) {
    for (State q = 0; q < m; ++q) {
      const Rule& r = policy.rule(n, q);
      if (!uses_interval_estimator(plant, r)) continue;
      cond[static_cast<size_t>((n - 1) * m + q)] = conditional_estimates(plant.sigma2, r.tau_lo, r.tau_hi);
    }
  }

  std::vector<std::vector<double>> stage_cost(static_cast<size_t>(N), std::vector<double>(static_cast<size_t>(trials)));
  std::vector<double> totals(static_cast<size_t>(trials));
  std::vector<long> attempts(static_cast<size_t>(N), 0);
  SimSummary out;
  out.trials = trials;
  out.seed = seed;
  out.occupancy.assign(static_cast<size_t>(N), std::vector<long>(static_cast<size_t>(m), 0));

  for (long k = 0; k < trials; ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k));
    double x = plant.x0;
    double e = 0.0;
    State q = fsm.initial_state;
    for (int t = 0; t <= N; ++t) {
      double w = 0.0;
      if (t > 0) {
        w = rng.normal(sigma);
        x = plant.a * x + w;
      }
      const double pre = t > 0 ? error_step(plant, e, false, w) : 0.0;
      const int stage = carried ? t + 1 : t;
      const bool decides = stage >= 1 && stage <= N;
      const State q_now = q;
      int r = 0;
      bool success = false;
      if (decides) {
        ++out.occupancy[static_cast<size_t>(stage - 1)][static_cast<size_t>(q)];
        r = decide(policy, stage, q, pre);
        if (r == 1) {
          success = sample_drop(fsm, q, rng);
          ++attempts[static_cast<size_t>(stage - 1)];
        }
      }
      const bool delivered = r == 1 && success;
      if (delivered) {
        e = error_step(plant, e, true, w);
      } else if (decides && uses_interval_estimator(plant, policy.rule(stage, q))) {
        const auto& ce = cond[static_cast<size_t>((stage - 1) * m + q)];
        e = x - (r == 1 ? ce.attempted : ce.silent);
      } else {
        e = pre;
      }
      if (t >= 1) {
        stage_cost[static_cast<size_t>(t - 1)][static_cast<size_t>(k)] = e * e;
        totals[static_cast<size_t>(k)] += e * e;
      }
      if (decides) q = step(fsm, q, r);
      if (trace != nullptr && k < trace_trials) {
        trace->push_back({k, t, x, x - e, e, r, success ? 1 : 0, q_now});
      }
    }
  }

  for (int t = 0; t < N; ++t) {
    const auto ms = mean_se(stage_cost[static_cast<size_t>(t)]);
    out.stage_mse.push_back(ms.mean);
    out.stage_se.push_back(ms.se);
    out.transmit_rate.push_back(static_cast<double>(attempts[static_cast<size_t>(t)]) / static_cast<double>(trials));
  }
  out.total = pairwise_sum(out.stage_mse.data(), out.stage_mse.size());
  out.total_se = mean_se(totals).se;
  return out;
}

}  // namespace remest
