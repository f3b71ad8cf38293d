#include "doctest.h"

#include <map>
#include <set>

#include "tempofair/errors.hpp"
#include "tempofair/instance_gen.hpp"

using namespace tempofair;

TEST_CASE("rng: portable draws") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t n = 1 + i % 97;
    const std::uint64_t v = a.below(n);
    CHECK(v == b.below(n));
    CHECK(v < n);
  }
  Rng c(7);
  const auto picks = c.distinct(10, 10);
  CHECK(std::set<std::uint64_t>(picks.begin(), picks.end()).size() == 10);
  CHECK_THROWS_AS(c.distinct(3, 4), ArgumentError);
}

TEST_CASE("gen_vrp: layout and determinism") {
  SUBCASE("tiny grid is forced") {
    const VrpInstance inst = gen_vrp(3, 8, 2, 99);
    CHECK(inst.n_points() == 9);
    CHECK(inst.points()[0] == std::pair<int, int>{1, 1});
    std::set<std::pair<int, int>> cells(inst.points().begin(), inst.points().end());
    CHECK(cells.size() == 9); // every cell exactly once
  }
  SUBCASE("same seed, same instance") {
    const VrpInstance a = gen_vrp(21, 12, 4, 2024);
    const VrpInstance b = gen_vrp(21, 12, 4, 2024);
    CHECK(a.points() == b.points());
    const VrpInstance c = gen_vrp(21, 12, 4, 2025);
    CHECK(a.points() != c.points());
  }
  SUBCASE("depot at the grid center") {
    CHECK(gen_vrp(21, 5, 2, 1).points()[0] == std::pair<int, int>{10, 10});
    CHECK(gen_vrp(8, 5, 2, 1).points()[0] == std::pair<int, int>{4, 4});
  }
  SUBCASE("too many points") {
    CHECK_THROWS_AS(gen_vrp(3, 9, 2, 1), ArgumentError);
  }
  SUBCASE("triangle inequality holds for generated distances") {
    const VrpInstance inst = gen_vrp(15, 10, 3, 5);
    const std::size_t n = inst.n_points();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
          CHECK(inst.distance(a, c) <= inst.distance(a, b) + inst.distance(b, c) + 1e-9);
        }
      }
    }
  }
  SUBCASE("cell marginals are near-uniform") {
    // 5x5 grid, 3 points: each non-depot cell should appear with frequency
    // 3/24 = 0.125; allow three standard errors over 1000 seeds.
    std::map<std::pair<int, int>, int> hits;
    const int trials = 1000;
    for (int s = 0; s < trials; ++s) {
      const VrpInstance inst = gen_vrp(5, 3, 1, 40000 + static_cast<unsigned>(s));
      for (std::size_t p = 1; p < inst.n_points(); ++p) ++hits[inst.points()[p]];
    }
    const double expected = 3.0 / 24.0;
    const double stderr3 = 3.0 * std::sqrt(expected * (1 - expected) / trials);
    for (const auto& [cell, count] : hits) {
      CHECK(std::abs(static_cast<double>(count) / trials - expected) <= stderr3);
    }
    CHECK(hits.size() == 24);
  }
}

TEST_CASE("gen_vrp_history: sorted per-step distances") {
  const History h = gen_vrp_history(3, 9, 6, 2, 77);
  REQUIRE(h.size() == 3);
  CHECK(h.entities() == std::vector<std::string>{"V1", "V2"});
  std::vector<double> cumulative(2, 0.0);
  for (const UtilityVector& step : h.steps) {
    CHECK(step.values[0] <= step.values[1]);
    cumulative[0] += step.values[0];
    cumulative[1] += step.values[1];
  }
  CHECK(cumulative[0] <= cumulative[1]);

  const History again = gen_vrp_history(3, 9, 6, 2, 77);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(again.steps[k].values == h.steps[k].values);
  }
}

TEST_CASE("gen_tap: cost recipe") {
  const TapInstance inst = gen_tap(40, {}, 11);
  for (const auto& row : inst.cost) {
    std::map<double, int> counts;
    for (double c : row) ++counts[c];
    CHECK(counts[5.0] == 1);
    CHECK(counts[20.0] == 3);
    CHECK(counts[30.0] == 36);
  }

  const TapInstance constrained = gen_tap(40, {0, 5}, 11);
  for (int a : {0, 5}) {
    std::map<double, int> counts;
    for (double c : constrained.cost[static_cast<std::size_t>(a)]) ++counts[c];
    CHECK(counts[5.0] == 0);
    CHECK(counts[20.0] == 3);
    CHECK(counts[30.0] == 37);
  }

  SUBCASE("n = 4 still has exactly one cost-5 per row") {
    const TapInstance small = gen_tap(4, {}, 3);
    for (const auto& row : small.cost) {
      CHECK(std::count(row.begin(), row.end(), 5.0) == 1);
    }
  }

  SUBCASE("position marginals are near-uniform") {
    const int trials = 1000;
    std::vector<int> hits(40, 0);
    for (int s = 0; s < trials; ++s) {
      const TapInstance t = gen_tap(40, {}, 90000 + static_cast<unsigned>(s));
      for (std::size_t pos = 0; pos < 40; ++pos) {
        if (t.cost[7][pos] == 5.0) ++hits[pos];
      }
    }
    const double expected = 1.0 / 40.0;
    const double stderr3 = 3.0 * std::sqrt(expected * (1 - expected) / trials);
    for (int count : hits) {
      CHECK(std::abs(static_cast<double>(count) / trials - expected) <= stderr3);
    }
  }
}

TEST_CASE("gen_tap_run: run protocol") {
  const TapRun run = gen_tap_run(4242);
  CHECK(run.instances.size() == 6);
  CHECK(run.constrained_agents.size() == 8);
  CHECK(run.debt_agents.size() == 4);

  // W and C are disjoint.
  for (int w : run.debt_agents) {
    CHECK(std::find(run.constrained_agents.begin(), run.constrained_agents.end(), w) ==
          run.constrained_agents.end());
  }

  // First three instances unconstrained, last three constrained on C.
  for (int i = 0; i < 6; ++i) {
    for (int a : run.constrained_agents) {
      const auto& row = run.instances[static_cast<std::size_t>(i)]
                             .cost[static_cast<std::size_t>(a)];
      const long fives = std::count(row.begin(), row.end(), 5.0);
      CHECK(fives == (i < 3 ? 1 : 0));
    }
  }

  // Synthetic debt: 4 agents at 180, 24 at 30, 12 at 120; total 2880.
  REQUIRE(run.history.size() == 1);
  const std::vector<double>& debt = run.history.steps[0].values;
  CHECK(std::count(debt.begin(), debt.end(), 180.0) == 4);
  CHECK(std::count(debt.begin(), debt.end(), 30.0) == 24);
  CHECK(std::count(debt.begin(), debt.end(), 120.0) == 12);
  double total = 0.0;
  for (double d : debt) total += d;
  CHECK(total == doctest::Approx(2880.0));
  for (int w : run.debt_agents) {
    CHECK(debt[static_cast<std::size_t>(w)] == 180.0);
  }

  // Determinism.
  const TapRun again = gen_tap_run(4242);
  CHECK(again.constrained_agents == run.constrained_agents);
  CHECK(again.debt_agents == run.debt_agents);
  for (int i = 0; i < 6; ++i) {
    CHECK(again.instances[static_cast<std::size_t>(i)].cost ==
          run.instances[static_cast<std::size_t>(i)].cost);
  }
}

TEST_CASE("gen_nsp_histories: mirrored fairness trends") {
  const auto [h1, h2] = gen_nsp_histories(0);
  REQUIRE(h1.size() == 15);
  REQUIRE(h2.size() == 15);

  // Weekly fairness staircase 0 -> 0.5 -> 1 and its mirror.
  for (int w = 0; w < 15; ++w) {
    const double expect1 = w < 5 ? 0.0 : (w < 10 ? 0.5 : 1.0);
    CHECK(maximin_ratio(h1.steps[static_cast<std::size_t>(w)]) ==
          doctest::Approx(expect1));
    CHECK(maximin_ratio(h2.steps[static_cast<std::size_t>(w)]) ==
          doctest::Approx(maximin_ratio(h1.steps[static_cast<std::size_t>(14 - w)])));
  }

  // Same multiset of steps: cumulative fairness at the end matches.
  const std::vector<UtilityVector> probe{
      UtilityVector(h1.entities(), std::vector<double>(5, 0.0))};
  // A zero-utility probe step leaves totals untouched.
  const double f1 = maximin_ratio_temporal(h1, probe, DiscountSpec(1, 1));
  const double f2 = maximin_ratio_temporal(h2, probe, DiscountSpec(1, 1));
  CHECK(f1 == doctest::Approx(f2));

  // Discounting favors the history that ends fair.
  const double d1 = maximin_ratio_temporal(h1, probe, DiscountSpec(0.65, 1));
  const double d2 = maximin_ratio_temporal(h2, probe, DiscountSpec(0.65, 1));
  CHECK(d1 > d2);
}
