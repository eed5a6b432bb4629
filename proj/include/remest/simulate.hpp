#pragma once

#include <cstdint>
#include <vector>

#include "remest/channel.hpp"
#include "remest/policy.hpp"
#include "remest/process.hpp"

namespace remest {

struct SimSummary {
  std::vector<double> stage_mse;       ///< E[E_t^2] for t = 1..N
  std::vector<double> stage_se;
  double total = 0.0;                  ///< sum of stage_mse
  double total_se = 0.0;               ///< from per-trial totals
  std::vector<double> transmit_rate;   ///< per policy stage n = 1..N
  std::vector<std::vector<long>> occupancy;  ///< [n - 1][q] visits at decision stage n
  long trials = 0;
  std::uint64_t seed = 0;
};

struct TraceRow {
  long trial = 0;
  int n = 0;        ///< process time
  double x = 0.0;
  double xhat = 0.0;
  double e = 0.0;
  int r = 0;
  int c = 0;
  State q = 0;      ///< channel state when the decision was taken
};

/// Closed-loop Monte Carlo of plant, policy, channel and estimator. Trial k
/// draws from RngStream(seed, k), so results do not depend on scheduling.
/// The estimator predicts a * xhat between deliveries; for a = 0 with interval
/// rules it uses the conditional means of the silent / attempted regions.
/// Asymmetric policies are rejected unless a = 0 and the rules are intervals.
/// When `trace` is non-null, rows for the first `trace_trials` trials are appended.
SimSummary simulate(const PlantModel& plant, const ChannelFsm& fsm, const TransmitPolicy& policy, long trials,
                    std::uint64_t seed, std::vector<TraceRow>* trace = nullptr, long trace_trials = 0);

/// Sum with pairwise (cascade) summation.
double pairwise_sum(const double* first, size_t n);

}  // namespace remest
