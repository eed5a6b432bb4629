#include "remest/dp_iid.hpp"

#include <cmath>
#include <limits>

#include "remest/errors.hpp"
#include "remest/quadrature.hpp"

namespace remest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PartialMoments complement_moments(double sigma2, double lo, double hi) {
  if (!(lo < hi)) return partial_moments(sigma2, -kInf, kInf);
  PartialMoments pm = partial_moments(sigma2, -kInf, lo);
  pm += partial_moments(sigma2, hi, kInf);
  return pm;
}

struct Objective {
  double sigma2, p, gap;

  IntervalOptimum operator()(double lo, double hi) const {
    if (!(lo < hi)) lo = hi = 0.0;
    const auto sc = iid_stage_cost(sigma2, p, lo, hi);
    return {lo, hi, sc.cost + sc.p_transmit * gap, sc.p_transmit};
  }
};

// Coordinate pattern search from `best`, halving the step down to `floor`.
// Infinite coordinates stay fixed.
IntervalOptimum refine(const Objective& f, IntervalOptimum best, double step, double floor, bool symmetric) {
  for (int iter = 0; iter < 100000 && step > floor; ++iter) {
    bool improved = false;
    for (int coord = 0; coord < (symmetric ? 1 : 2); ++coord) {
      for (double dir : {-1.0, 1.0}) {
        double lo = best.tau_lo, hi = best.tau_hi;
        if (symmetric) {
          if (std::isinf(hi)) continue;
          hi = std::max(0.0, hi + dir * step);
          lo = -hi;
        } else if (coord == 0) {
          if (std::isinf(lo)) continue;
          lo += dir * step;
        } else {
          if (std::isinf(hi)) continue;
          hi += dir * step;
        }
        if (!(lo < hi)) continue;
        const auto cand = f(lo, hi);
        if (cand.objective < best.objective) {
          best = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

StageCost iid_stage_cost(double sigma2, double p_drop, double tau_lo, double tau_hi) {
  if (tau_hi < tau_lo) throw ArgumentError("iid_stage_cost requires tau_lo <= tau_hi");
  if (!(p_drop >= 0.0 && p_drop <= 1.0)) throw ArgumentError("drop probability out of [0, 1]");
  const auto silent = partial_moments(sigma2, tau_lo, tau_hi);
  const auto attempted = complement_moments(sigma2, tau_lo, tau_hi);
  return {silent.scaled_variance() + p_drop * attempted.scaled_variance(), attempted.m0};
}

ConditionalEstimates conditional_estimates(double sigma2, double tau_lo, double tau_hi) {
  const auto silent = partial_moments(sigma2, tau_lo, tau_hi);
  const auto attempted = complement_moments(sigma2, tau_lo, tau_hi);
  ConditionalEstimates ce;
  ce.silent = silent.m0 > 1e-300 ? silent.m1 / silent.m0 : std::nan("");
  ce.attempted = attempted.m0 > 1e-300 ? attempted.m1 / attempted.m0 : std::nan("");
  if (std::isnan(ce.silent) && std::isnan(ce.attempted)) throw DegenerateRegionError("both regions are empty");
  return ce;
}

Rule IntervalOptimum::rule() const {
  if (!(tau_lo < tau_hi)) return Rule::always();
  return Rule::interval(tau_lo, tau_hi);
}

IntervalOptimum optimize_symmetric_interval(double sigma2, double p_drop, double continuation_gap,
                                            const SearchSettings& settings) {
  if (settings.coarse_points < 3) throw ArgumentError("search grid needs at least 3 points");
  const Objective f{sigma2, p_drop, continuation_gap};
  const double sigma = std::sqrt(sigma2);
  const double span = settings.span_sigmas * sigma;
  const double step = 2.0 * span / (settings.coarse_points - 1);
  IntervalOptimum best = f(0.0, 0.0);
  auto consider = [&](double tau) {
    const auto c = f(-tau, tau);
    if (c.objective < best.objective) best = c;
  };
  consider(kInf);
  for (double tau = step; tau <= span * (1.0 + 1e-12); tau += step) consider(tau);
  return refine(f, best, step, settings.tolerance * sigma, true);
}

IntervalOptimum optimize_interval(double sigma2, double p_drop, double continuation_gap,
                                  const SearchSettings& settings) {
  if (settings.coarse_points < 3) throw ArgumentError("search grid needs at least 3 points");
  const Objective f{sigma2, p_drop, continuation_gap};
  const double sigma = std::sqrt(sigma2);
  const double span = settings.span_sigmas * sigma;
  const int K = settings.coarse_points;
  const double step = 2.0 * span / (K - 1);

  std::vector<double> ticks;
  ticks.push_back(-kInf);
  for (int i = 0; i < K; ++i) ticks.push_back(-span + i * step);
  ticks.push_back(kInf);

  IntervalOptimum best = f(0.0, 0.0);
  auto consider = [&](const IntervalOptimum& c) {
    if (c.objective < best.objective) best = c;
  };
  consider(f(-kInf, kInf));
  // The symmetric optimum seeds the search so the unrestricted result never loses to it.
  consider(optimize_symmetric_interval(sigma2, p_drop, continuation_gap, settings));
  for (size_t i = 0; i < ticks.size(); ++i) {
    for (size_t j = i + 1; j < ticks.size(); ++j) consider(f(ticks[i], ticks[j]));
  }
  return refine(f, best, step, settings.tolerance * sigma, false);
}

double IidValueTable::value(int n, State q) const {
  if (n < 1 || n > horizon + 1 || q < 0 || q >= num_states) throw ArgumentError("value index out of range");
  return V[static_cast<size_t>((n - 1) * num_states + q)];
}

const IntervalOptimum& IidValueTable::at(int n, State q) const {
  if (n < 1 || n > horizon || q < 0 || q >= num_states) throw ArgumentError("optimum index out of range");
  return optimum[static_cast<size_t>((n - 1) * num_states + q)];
}

TransmitPolicy IidValueTable::policy() const {
  TransmitPolicy p;
  p.kind = RuleKind::interval_pair;
  p.alignment = StageAlignment::current_sample;
  p.horizon = horizon;
  p.num_states = num_states;
  p.masked = masked;
  p.symmetric = true;
  for (int n = 1; n <= horizon; ++n) {
    for (State q = 0; q < num_states; ++q) {
      Rule r = masked[static_cast<size_t>(q)] ? Rule::never() : at(n, q).rule();
      if (!r.is_symmetric()) p.symmetric = false;
      p.rules.push_back(r);
    }
  }
  return p;
}

IidValueTable iid_backward_induction(const ChannelFsm& fsm, double sigma2, int horizon,
                                     const SearchSettings& settings) {
  require_valid(fsm);
  if (!(sigma2 > 0.0)) throw ArgumentError("sigma2 must be positive");
  if (horizon < 1) throw ArgumentError("horizon must be at least 1");
  const int m = fsm.num_states;
  IidValueTable t;
  t.horizon = horizon;
  t.num_states = m;
  t.sigma2 = sigma2;
  t.initial_state = fsm.initial_state;
  for (State q = 0; q < m; ++q) t.masked.push_back(!fsm.allowed(q));
  t.V.assign(static_cast<size_t>((horizon + 1) * m), 0.0);
  t.optimum.resize(static_cast<size_t>(horizon * m));
  t.symmetric_objective.resize(static_cast<size_t>(horizon * m));

  for (int n = horizon; n >= 1; --n) {
    for (State q = 0; q < m; ++q) {
      const auto& tr = fsm.transitions[static_cast<size_t>(q)];
      const double v0 = t.value(n + 1, tr.on_silent);
      const auto idx = static_cast<size_t>((n - 1) * m + q);
      if (!fsm.allowed(q)) {
        t.optimum[idx] = {-kInf, kInf, sigma2, 0.0};
        t.symmetric_objective[idx] = sigma2;
        t.V[idx] = sigma2 + v0;
        continue;
      }
      const double gap = t.value(n + 1, *tr.on_transmit) - v0;
      const double p = fsm.drop(q);
      const auto best = optimize_interval(sigma2, p, gap, settings);
      const auto sym = optimize_symmetric_interval(sigma2, p, gap, settings);
      t.optimum[idx] = best;
      t.symmetric_objective[idx] = sym.objective;
      t.V[idx] = best.objective + v0;
      if (best.objective < sym.objective - kAsymmetryTolerance * sigma2) {
        t.asymmetry_log.push_back({n, q, sym.objective, best.objective, best.tau_lo, best.tau_hi});
      }
    }
  }
  return t;
}

}  // namespace remest
