#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "../oracles.hpp"
#include "remest/dp_symmetric.hpp"
#include "remest/errors.hpp"
#include "remest/instances.hpp"

using namespace remest;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const ThresholdReport& energy_report() {
  static const ThresholdReport rep = [] {
    const PlantModel plant{1.1, 1.0, 0.0, 20};
    const auto fsm = energy_harvesting_fsm(4, 2, 0.3);
    return solve_and_extract(plant, fsm, SolverSettings{}.make_grid(plant));
  }();
  return rep;
}

}  // namespace

TEST_CASE("useless channel reproduces the open-loop cost") {
  for (double a : {0.8, 1.0, 1.1}) {
    const PlantModel plant{a, 1.0, 0.0, 3};
    SolverSettings s;
    s.num_points = 801;
    const auto sol = backward_induction(plant, constant_fsm(1.0), s);
    const auto& t = sol.table;
    for (int n = 1; n <= 3; ++n) {
      REQUIRE(t.C1[t.index(n, 0)].has_value());
      const auto& c0 = t.C0[t.index(n, 0)];
      const auto& c1 = *t.C1[t.index(n, 0)];
      for (size_t i = 0; i < c0.size(); ++i) REQUIRE(c0[i] == c1[i]);
      for (bool tx : t.transmit[t.index(n, 0)]) REQUIRE_FALSE(tx);
    }
    CHECK(t.initial_value() == doctest::Approx(oracle::open_loop_cost(a, 1.0, 3)).epsilon(1e-9));
  }
}

TEST_CASE("free channel, one stage") {
  const PlantModel plant{1.0, 1.0, 0.0, 1};
  SolverSettings s;
  s.half_width = 10.0;
  s.num_points = 1001;
  const auto sol = backward_induction(plant, constant_fsm(0.0), s);
  const auto& t = sol.table;
  const auto& g = t.grid;
  const auto& c0 = t.C0[t.index(1, 0)];
  const auto& c1 = *t.C1[t.index(1, 0)];
  for (int i = 0; i < g.size(); ++i) {
    const double e = g.point(i);
    const auto ui = static_cast<size_t>(i);
    REQUIRE(c0[ui] == doctest::Approx(2.0 * e * e + 1.0).epsilon(1e-10));
    REQUIRE(c1[ui] == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(t.value(1, 0)[ui] == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(t.transmit[t.index(1, 0)][ui] == (i != g.radius()));
  }
}

TEST_CASE("free channel leaves only the last step's noise") {
  // the final time has no transmission opportunity in this recursion
  const PlantModel plant{1.3, 2.0, 0.0, 4};
  SolverSettings s;
  s.num_points = 1201;
  const auto sol = backward_induction(plant, constant_fsm(0.0), s);
  CHECK(sol.table.initial_value() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("terminal slice is the squared error") {
  const PlantModel plant{1.1, 1.0, 0.0, 3};
  SolverSettings s;
  s.half_width = 10.0;
  s.num_points = 1001;
  const auto fsm = energy_harvesting_fsm(4, 2, 0.3);
  const auto sol = backward_induction(plant, fsm, s);
  const int i2 = sol.table.grid.nearest_index(2.0);
  for (State q = 0; q < 5; ++q) {
    CHECK(sol.table.value(4, q)[static_cast<size_t>(i2)] == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("masked states have no transmit branch") {
  const PlantModel plant{1.1, 1.0, 0.0, 4};
  SolverSettings s;
  s.num_points = 801;
  const auto sol = backward_induction(plant, energy_harvesting_fsm(4, 2, 0.3), s);
  for (int n = 1; n <= 4; ++n) {
    CHECK_FALSE(sol.table.C1[sol.table.index(n, 0)].has_value());
    CHECK_FALSE(sol.table.C1[sol.table.index(n, 1)].has_value());
    CHECK(sol.table.C1[sol.table.index(n, 2)].has_value());
  }
}

TEST_CASE("value cap") {
  const PlantModel plant{1.1, 1.0, 0.0, 5};
  SolverSettings s;
  s.num_points = 401;
  s.value_cap = 10.0;
  CHECK_THROWS_AS(backward_induction(plant, constant_fsm(1.0), s), NumericOverflowError);
}

TEST_CASE("curvature constants") {
  const auto b = slope_bound({1.1, 1.0, 0.0, 20});
  CHECK(b.v == doctest::Approx(49.61).epsilon(1e-12));
  CHECK(b.threshold_condition == doctest::Approx(1.0 / 50.61).epsilon(1e-12));
  CHECK(b.threshold_condition == doctest::Approx(0.019758).epsilon(1e-4));
  CHECK(b.at(21) == doctest::Approx(1.21));

  const auto zero = slope_bound({0.0, 1.0, 0.0, 7});
  CHECK(zero.v == 0.0);
  CHECK(zero.threshold_condition == 1.0);
  const std::vector<double> p{0.99, 0.5};
  CHECK(small_drop_condition({0.0, 1.0, 0.0, 7}, workload_chain_fsm(1, p)).satisfied);
  CHECK_FALSE(small_drop_condition({1.1, 1.0, 0.0, 20}, energy_harvesting_fsm(4, 2, 0.3)).satisfied);
}

TEST_CASE("value functions are symmetric and non-decreasing in |e|") {
  const auto& t = energy_report().solution.table;
  const auto r = check_value_structure(t, 1e-8);
  CHECK(r.ok());
  CHECK(r.slices_checked == 21 * 5);
}

TEST_CASE("a planted defect is reported where it was planted") {
  const PlantModel plant{1.1, 1.0, 0.0, 4};
  SolverSettings s;
  s.num_points = 801;
  auto t = backward_induction(plant, energy_harvesting_fsm(4, 2, 0.3), s).table;
  auto& f = t.value(3, 2);
  const size_t last = f.size() - 1;
  f.set(last, f[last] - 1.0);
  const auto r = check_value_structure(t, 1e-8);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().n == 3);
  CHECK(r.violations.front().q == 2);
  CHECK(r.violations.front().e == doctest::Approx(t.grid.half_width()));
}

TEST_CASE("curvature bound") {
  SUBCASE("terminal stage quotient equals a^2") {
    const PlantModel plant{1.1, 1.0, 0.0, 2};
    SolverSettings s;
    s.num_points = 1001;
    const auto t = backward_induction(plant, energy_harvesting_fsm(4, 2, 0.3), s).table;
    const auto r = check_curvature_bound(t, 10.0 * t.grid.spacing());
    CHECK(r.ok());
    CHECK(r.max_quotient.back() == doctest::Approx(1.21).epsilon(1e-6));
  }
  SUBCASE("white process has flat expectations") {
    const PlantModel plant{0.0, 1.0, 0.0, 3};
    SolverSettings s;
    s.half_width = 10.0;
    s.num_points = 801;
    const auto t = backward_induction(plant, energy_harvesting_fsm(4, 2, 0.3), s).table;
    const auto r = check_curvature_bound(t, 10.0 * t.grid.spacing());
    CHECK(r.ok());
    for (double q : r.max_quotient) CHECK(q <= 1e-9);
    for (double v : slope_bound(plant).v_prime) CHECK(v == 0.0);
  }
  SUBCASE("energy instance") {
    const auto& t = energy_report().solution.table;
    const auto r = check_curvature_bound(t, 10.0 * t.grid.spacing());
    CHECK(r.ok());
    CHECK(r.points_checked > 0);
  }
}

TEST_CASE("energy instance thresholds") {
  const auto& rep = energy_report();
  CHECK(rep.not_threshold_reachable == 0);
  for (int n = 1; n <= 20; ++n) {
    for (State q = 0; q < 5; ++q) {
      const auto& r = rep.result(n, q);
      REQUIRE(r.is_threshold);
      if (q < 2) {
        CHECK(r.rule.tau() == kInf);
      } else if (rep.reachable[static_cast<size_t>(n - 1)][static_cast<size_t>(q)]) {
        CHECK(std::isfinite(r.rule.tau()));
        CHECK(r.rule.is_symmetric());
      }
    }
  }
}

TEST_CASE("small drop probabilities give threshold policies") {
  for (int k = 0; k < 15; ++k) {
    RngStream rng(2024, static_cast<std::uint64_t>(k));
    const auto inst = random_small_drop_instance(rng, 5, 8);
    REQUIRE(small_drop_condition(inst.plant, inst.fsm).satisfied);
    SolverSettings s;
    s.num_points = 801;
    const auto rep = solve_and_extract(inst.plant, inst.fsm, s.make_grid(inst.plant));
    CHECK(rep.not_threshold_reachable == 0);
  }
}

TEST_CASE("refining the grid changes the value little") {
  const PlantModel plant{1.1, 1.0, 0.0, 6};
  const auto fsm = energy_harvesting_fsm(4, 2, 0.3);
  SolverSettings coarse, fine;
  coarse.num_points = 1001;
  fine.num_points = 4001;
  const double v1 = backward_induction(plant, fsm, coarse).table.initial_value();
  const double v2 = backward_induction(plant, fsm, fine).table.initial_value();
  CHECK(v1 == doctest::Approx(v2).epsilon(1e-3));
}

TEST_CASE("provenance depends on the instance and the grid") {
  const PlantModel plant{1.1, 1.0, 0.0, 3};
  SolverSettings s;
  s.num_points = 401;
  const auto a = backward_induction(plant, energy_harvesting_fsm(4, 2, 0.3), s).table.provenance;
  const auto b = backward_induction(plant, energy_harvesting_fsm(4, 2, 0.3), s).table.provenance;
  const auto c = backward_induction(plant, energy_harvesting_fsm(4, 2, 0.31), s).table.provenance;
  s.num_points = 601;
  const auto d = backward_induction(plant, energy_harvesting_fsm(4, 2, 0.3), s).table.provenance;
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a != d);
  CHECK(a.substr(0, a.find(':')) == d.substr(0, d.find(':')));
}
