#include "remest/policy.hpp"

#include <cmath>
#include <limits>

#include "remest/errors.hpp"

namespace remest {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool Rule::is_never() const {
  switch (kind) {
    case RuleKind::symmetric_threshold:
    case RuleKind::interval_pair:
      return tau_lo == -kInf && tau_hi == kInf;
    case RuleKind::always_transmit:
      return false;
    case RuleKind::gridded:
      for (bool t : transmit) {
        if (t) return false;
      }
      return true;
  }
  return false;
}

bool Rule::is_symmetric(double tol) const {
  switch (kind) {
    case RuleKind::symmetric_threshold:
    case RuleKind::always_transmit:
      return true;
    case RuleKind::interval_pair:
      if (std::isinf(tau_lo) || std::isinf(tau_hi)) return tau_lo == -tau_hi;
      return std::abs(tau_lo + tau_hi) <= tol;
    case RuleKind::gridded:
      for (size_t i = 0, j = transmit.size() - 1; i < j; ++i, --j) {
        if (transmit[i] != transmit[j]) return false;
      }
      return true;
  }
  return false;
}

const Rule& TransmitPolicy::rule(int n, State q) const {
  if (n < 1 || n > horizon || q < 0 || q >= num_states) throw ArgumentError("policy index out of range");
  return rules[static_cast<size_t>((n - 1) * num_states + q)];
}

Rule& TransmitPolicy::rule(int n, State q) {
  return const_cast<Rule&>(static_cast<const TransmitPolicy&>(*this).rule(n, q));
}

TransmitPolicy uniform_policy(const ChannelFsm& fsm, int horizon, const Rule& rule, StageAlignment alignment) {
  TransmitPolicy p;
  p.kind = rule.kind == RuleKind::always_transmit ? RuleKind::symmetric_threshold : rule.kind;
  p.symmetric = rule.is_symmetric();
  p.alignment = alignment;
  p.horizon = horizon;
  p.num_states = fsm.num_states;
  for (State q = 0; q < fsm.num_states; ++q) p.masked.push_back(!fsm.allowed(q));
  for (int n = 1; n <= horizon; ++n) {
    for (State q = 0; q < fsm.num_states; ++q) p.rules.push_back(fsm.allowed(q) ? rule : Rule::never());
  }
  return p;
}

int decide(const Rule& rule, double e, const ErrorGrid* grid) {
  switch (rule.kind) {
    case RuleKind::symmetric_threshold:
      return std::abs(e) > rule.tau_hi ? 1 : 0;
    case RuleKind::interval_pair:
      return (e < rule.tau_lo || e > rule.tau_hi) ? 1 : 0;
    case RuleKind::always_transmit:
      return 1;
    case RuleKind::gridded:
      if (grid == nullptr) throw ArgumentError("gridded rule needs its grid");
      return rule.transmit.at(static_cast<size_t>(grid->nearest_index(e))) ? 1 : 0;
  }
  return 0;
}

int decide(const TransmitPolicy& policy, int n, State q, double e) {
  const Rule& r = policy.rule(n, q);
  if (policy.masked.at(static_cast<size_t>(q))) return 0;
  return decide(r, e, policy.grid ? &*policy.grid : nullptr);
}

ThresholdResult extract_threshold(const TransmitSet& set, bool symmetric) {
  const auto& g = set.grid;
  const auto n = static_cast<int>(set.transmit.size());
  if (n != g.size()) throw ArgumentError("transmit set does not match its grid");

  int first = -1, last = -1;
  for (int i = 0; i < n; ++i) {
    if (!set.transmit[static_cast<size_t>(i)]) {
      if (first < 0) first = i;
      last = i;
    }
  }
  ThresholdResult res;
  if (first < 0) {
    res.is_threshold = true;
    res.rule = Rule::always();
    return res;
  }
  for (int i = first + 1; i < last; ++i) {
    if (set.transmit[static_cast<size_t>(i)]) {
      res.witness = std::array<double, 3>{g.point(first), g.point(i), g.point(last)};
      res.reason = "transmit region splits the silent region";
      return res;
    }
  }
  const double half = 0.5 * g.spacing();
  const double lo = first == 0 ? -kInf : g.point(first) - half;
  const double hi = last == n - 1 ? kInf : g.point(last) + half;
  if (!symmetric) {
    res.is_threshold = true;
    res.rule = Rule::interval(lo, hi);
    return res;
  }
  const bool both_inf = std::isinf(lo) && std::isinf(hi);
  const bool one_inf = std::isinf(lo) != std::isinf(hi);
  if (one_inf || (!both_inf && std::abs(lo + hi) > g.spacing() * (1.0 + 1e-9))) {
    res.reason = "silent region is not centred on zero";
    return res;
  }
  res.is_threshold = true;
  res.rule = Rule::symmetric(both_inf ? kInf : 0.5 * (hi - lo));
  return res;
}

}  // namespace remest
