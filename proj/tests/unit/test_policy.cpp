#include <doctest.h>

#include <cmath>
#include <limits>

#include "remest/channel.hpp"
#include "remest/errors.hpp"
#include "remest/policy.hpp"
#include "remest/rng.hpp"

using namespace remest;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

TransmitSet planted(const ErrorGrid& g, const Rule& r) {
  TransmitSet s{g, {}};
  for (int i = 0; i < g.size(); ++i) s.transmit.push_back(decide(r, g.point(i)) == 1);
  return s;
}
}  // namespace

TEST_CASE("rule decisions") {
  const auto sym = Rule::symmetric(2.0);
  CHECK(decide(sym, 3.0) == 1);
  CHECK(decide(sym, -3.0) == 1);
  CHECK(decide(sym, 1.0) == 0);
  CHECK(decide(sym, 2.0) == 0);

  const auto iv = Rule::interval(-1.0, 4.0);
  CHECK(decide(iv, -2.0) == 1);
  CHECK(decide(iv, 0.0) == 0);
  CHECK(decide(iv, 5.0) == 1);

  CHECK(decide(Rule::always(), 0.0) == 1);
  CHECK(decide(Rule::never(), 1e300) == 0);
  CHECK(Rule::never().is_never());
  CHECK(Rule::always().tau() == 0.0);
  CHECK_THROWS_AS(decide(Rule{RuleKind::gridded, 0, 0, {true}}, 0.0), ArgumentError);
}

TEST_CASE("masked states never transmit") {
  const auto fsm = energy_harvesting_fsm(4, 2, 0.3);
  auto pol = uniform_policy(fsm, 3, Rule::always());
  for (int n = 1; n <= 3; ++n) {
    CHECK(decide(pol, n, 0, 100.0) == 0);
    CHECK(decide(pol, n, 1, -100.0) == 0);
    CHECK(decide(pol, n, 4, 0.0) == 1);
  }
  // even a rule that says otherwise is overridden by the mask
  pol.rule(1, 0) = Rule::always();
  CHECK(decide(pol, 1, 0, 5.0) == 0);
}

TEST_CASE("threshold extraction limits") {
  const ErrorGrid g(10.0, 2001);
  const auto all = extract_threshold({g, std::vector<bool>(2001, true)}, true);
  CHECK(all.is_threshold);
  CHECK(all.rule.kind == RuleKind::always_transmit);
  CHECK(all.rule.tau() == 0.0);

  const auto none = extract_threshold({g, std::vector<bool>(2001, false)}, true);
  CHECK(none.is_threshold);
  CHECK(none.rule.tau() == kInf);
  CHECK(none.rule.is_never());

  const auto planted15 = extract_threshold(planted(g, Rule::symmetric(1.5)), true);
  REQUIRE(planted15.is_threshold);
  CHECK(planted15.rule.tau() >= 1.49);
  CHECK(planted15.rule.tau() <= 1.51);
}

TEST_CASE("non-threshold sets produce a witness") {
  const ErrorGrid g(5.0, 501);
  TransmitSet s = planted(g, Rule::symmetric(2.0));
  s.transmit[250] = true;  // transmit at 0 inside the silent band
  const auto r = extract_threshold(s, true);
  CHECK_FALSE(r.is_threshold);
  REQUIRE(r.witness.has_value());
  const auto& w = *r.witness;
  CHECK(w[0] < w[1]);
  CHECK(w[1] < w[2]);
  CHECK(decide(Rule::symmetric(2.0), w[0]) == 0);

  const auto off = extract_threshold(planted(g, Rule::interval(-1.0, 3.0)), true);
  CHECK_FALSE(off.is_threshold);
  const auto ok = extract_threshold(planted(g, Rule::interval(-1.0, 3.0)), false);
  CHECK(ok.is_threshold);
}

TEST_CASE("extracted rules reproduce the gridded decisions exactly") {
  RngStream rng(17);
  const ErrorGrid g(8.0, 801);
  for (int k = 0; k < 200; ++k) {
    const int i = static_cast<int>(rng.uniform() * g.size());
    const int j = static_cast<int>(rng.uniform() * g.size());
    TransmitSet s{g, std::vector<bool>(static_cast<size_t>(g.size()), true)};
    for (int t = std::min(i, j); t <= std::max(i, j); ++t) s.transmit[static_cast<size_t>(t)] = false;
    const auto r = extract_threshold(s, false);
    REQUIRE(r.is_threshold);
    for (int t = 0; t < g.size(); ++t) REQUIRE(decide(r.rule, g.point(t)) == (s.transmit[static_cast<size_t>(t)] ? 1 : 0));

    const int m = static_cast<int>(rng.uniform() * g.radius());
    TransmitSet sym{g, std::vector<bool>(static_cast<size_t>(g.size()), true)};
    for (int t = g.radius() - m; t <= g.radius() + m; ++t) sym.transmit[static_cast<size_t>(t)] = false;
    const auto rs = extract_threshold(sym, true);
    REQUIRE(rs.is_threshold);
    CHECK(rs.rule.is_symmetric());
    for (int t = 0; t < g.size(); ++t) {
      REQUIRE(decide(rs.rule, g.point(t)) == (sym.transmit[static_cast<size_t>(t)] ? 1 : 0));
    }
  }
}
