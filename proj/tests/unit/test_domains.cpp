#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "tempofair/domains/io.hpp"
#include "tempofair/errors.hpp"
#include "tempofair/milp/solver.hpp"

using namespace tempofair;

namespace {

std::vector<StepSolution> collect(const DomainInstance& inst, int step) {
  std::vector<StepSolution> out;
  inst.enumerate(step, [&](const StepSolution& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

// Exhaustive routing oracle: best objective over every ordered split of every
// point permutation, with optional gap fairness on offset-shifted lengths.
double vrp_brute_force(const VrpInstance& inst, double beta, bool fairness,
                       const std::vector<double>& offsets) {
  const std::size_t n = inst.n_points();
  const std::size_t nv = inst.n_vehicles();
  std::vector<std::size_t> perm;
  for (std::size_t p = 1; p < n; ++p) perm.push_back(p);

  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> lengths(nv);
  do {
    // Compositions of the permutation into nv nonempty consecutive parts.
    std::vector<std::size_t> cuts(nv - 1);
    std::function<void(std::size_t, std::size_t)> split = [&](std::size_t idx,
                                                              std::size_t from) {
      if (idx == nv - 1) {
        std::size_t begin = 0;
        double total = 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
          const std::size_t end = v + 1 < nv ? cuts[v] : perm.size();
          double len = 0.0;
          std::size_t prev = 0;
          for (std::size_t i = begin; i < end; ++i) {
            len += inst.distance(prev, perm[i]);
            prev = perm[i];
          }
          len += inst.distance(prev, 0);
          lengths[v] = len;
          total += len;
          begin = end;
        }
        double obj = -total;
        if (fairness) {
          double hi = -std::numeric_limits<double>::infinity();
          double lo = std::numeric_limits<double>::infinity();
          for (std::size_t v = 0; v < nv; ++v) {
            const double shifted = offsets.empty() ? lengths[v] : offsets[v] + lengths[v];
            hi = std::max(hi, shifted);
            lo = std::min(lo, shifted);
          }
          obj -= beta * (hi - lo);
        }
        best = std::max(best, obj);
        return;
      }
      for (std::size_t c = from + 1; c + (nv - 2 - idx) < perm.size() + 0; ++c) {
        if (c >= perm.size()) break;
        cuts[idx] = c;
        split(idx + 1, c);
      }
    };
    split(0, 0);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

} // namespace

TEST_CASE("cap: enumeration counts and canonical order") {
  SUBCASE("two lecturers, one course") {
    CapInstance inst({"l1", "l2"}, {"c1"}, {{1.0}, {1.0}}, 1.0);
    const auto cands = collect(inst, 0);
    REQUIRE(cands.size() == 3);
    // Lexicographic by the flattened load vector (l1 first).
    CHECK(cands[0].vars == std::vector<double>{0.0, 1.0});
    CHECK(cands[1].vars == std::vector<double>{0.5, 0.5});
    CHECK(cands[2].vars == std::vector<double>{1.0, 0.0});
  }
  SUBCASE("unavailable lecturer leaves a single option per course") {
    CapInstance inst({"l1", "l2"}, {"c1", "c2"}, {{1.0, 1.0}, {1.0, 1.0}}, 1.0,
                     {{0}});
    const auto cands = collect(inst, 0);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].utilities == std::vector<double>{0.0, 2.0});
    // Later steps have everyone back.
    CHECK(collect(inst, 1).size() == 9);
  }
  SUBCASE("three lecturers, two courses: 6 options per course") {
    CapInstance inst({"l1", "l2", "l3"}, {"c1", "c2"},
                     {{2.0, 2.0}, {1.5, 1.5}, {0.0, 0.0}}, 4.0);
    CHECK(collect(inst, 0).size() == 36);
  }
  SUBCASE("no available lecturer is infeasible") {
    CapInstance inst({"l1"}, {"c1"}, {{1.0}}, 1.0, {{0}});
    CHECK_THROWS_AS(collect(inst, 0), InfeasibleError);
  }
}

TEST_CASE("cap: quality and utilities") {
  CapInstance inst({"l1", "l2", "l3"}, {"c1", "c2"},
                   {{2.0, 2.0}, {1.5, 1.5}, {0.0, 0.0}}, 4.0);
  // Both courses fully on l1.
  std::vector<double> vars(6, 0.0);
  vars[inst.var_index(0, 0)] = 1.0;
  vars[inst.var_index(0, 1)] = 1.0;
  StepSolution sol = inst.evaluate(0, vars);
  CHECK(sol.quality == doctest::Approx(1.0));
  CHECK(sol.utilities == std::vector<double>{2.0, 0.0, 0.0});

  // One course each for l1 and l2.
  std::fill(vars.begin(), vars.end(), 0.0);
  vars[inst.var_index(0, 0)] = 1.0;
  vars[inst.var_index(1, 1)] = 1.0;
  sol = inst.evaluate(0, vars);
  CHECK(sol.quality == doctest::Approx(0.875));

  // All load on the unskilled lecturer.
  std::fill(vars.begin(), vars.end(), 0.0);
  vars[inst.var_index(2, 0)] = 1.0;
  vars[inst.var_index(2, 1)] = 1.0;
  sol = inst.evaluate(0, vars);
  CHECK(sol.quality == doctest::Approx(0.0));

  // Full plus half course for one lecturer sums to 1.5.
  std::fill(vars.begin(), vars.end(), 0.0);
  vars[inst.var_index(0, 0)] = 1.0;
  vars[inst.var_index(0, 1)] = 0.5;
  vars[inst.var_index(1, 1)] = 0.5;
  sol = inst.evaluate(0, vars);
  CHECK(sol.utilities[0] == doctest::Approx(1.5));
}

TEST_CASE("cap: constraint violations are named") {
  CapInstance inst({"l1", "l2"}, {"c1"}, {{1.0}, {1.0}}, 1.0, {{1}});
  std::vector<double> vars{0.25, 0.75};
  CHECK_THROWS_AS(inst.evaluate(0, vars), ConstraintViolation);
  vars = {0.0, 0.0};
  CHECK_THROWS_AS(inst.evaluate(0, vars), ConstraintViolation);
  vars = {0.0, 1.0}; // l2 unavailable at step 0
  CHECK_THROWS_WITH_AS(inst.evaluate(0, vars),
                       doctest::Contains("l2 is unavailable"), ConstraintViolation);
}

TEST_CASE("nsp: enumeration") {
  SUBCASE("two nurses, one day") {
    NspInstance inst({"n1", "n2"}, 1, {1.0, 0.0}, {{3, 0}, {1, 2}}, 1.0);
    const auto cands = collect(inst, 0);
    REQUIRE(cands.size() == 2);
    // Canonical order: morning nurse ascending, then evening.
    CHECK(cands[0].vars[inst.var_index(0, 0)] == 1.0);
    CHECK(cands[0].vars[inst.var_index(1, 1)] == 1.0);
    CHECK(cands[1].vars[inst.var_index(1, 0)] == 1.0);
    CHECK(cands[1].vars[inst.var_index(0, 1)] == 1.0);
    CHECK(cands[0].utilities == std::vector<double>{3.0, 2.0});
  }
  SUBCASE("five nurses, five days: 20^5 candidates") {
    std::vector<std::vector<int>> pref(5, std::vector<int>(10, 1));
    NspInstance inst({"n1", "n2", "n3", "n4", "n5"}, 5, {3, 2, 1, 0, 0}, pref, 15.0);
    long count = 0;
    inst.enumerate(0, [&](const StepSolution&) {
      ++count;
      return true;
    });
    CHECK(count == 3'200'000);
  }
}

TEST_CASE("nsp: quality and utilities on the week fixture") {
  // Five nurses; mornings/evenings with the utilities used in the appendix
  // experiment: n1 m3/e0, n2 m3/e1, n3 m3/e2, n4 m0/e3, n5 m1/e3.
  const std::vector<std::array<int, 2>> me{{3, 0}, {3, 1}, {3, 2}, {0, 3}, {1, 3}};
  std::vector<std::vector<int>> pref;
  for (const auto& [m, e] : me) {
    std::vector<int> row;
    for (int d = 0; d < 5; ++d) {
      row.push_back(m);
      row.push_back(e);
    }
    pref.push_back(row);
  }
  NspInstance inst({"n1", "n2", "n3", "n4", "n5"}, 5, {3, 2, 1, 0, 0}, pref, 15.0);

  // n1 on every evening, n2 on every morning: quality = 5*3/15 = 1.
  std::vector<double> vars(50, 0.0);
  for (int d = 0; d < 5; ++d) {
    vars[inst.var_index(1, static_cast<std::size_t>(d) * 2)] = 1.0;
    vars[inst.var_index(0, static_cast<std::size_t>(d) * 2 + 1)] = 1.0;
  }
  StepSolution sol = inst.evaluate(0, vars);
  CHECK(sol.quality == doctest::Approx(1.0));
  CHECK(sol.utilities[0] == doctest::Approx(0.0));  // n1 hates evenings
  CHECK(sol.utilities[1] == doctest::Approx(15.0)); // n2 on 5 mornings

  // n2 on evenings instead: 10/15.
  std::fill(vars.begin(), vars.end(), 0.0);
  for (int d = 0; d < 5; ++d) {
    vars[inst.var_index(0, static_cast<std::size_t>(d) * 2)] = 1.0;
    vars[inst.var_index(1, static_cast<std::size_t>(d) * 2 + 1)] = 1.0;
  }
  sol = inst.evaluate(0, vars);
  CHECK(sol.quality == doctest::Approx(10.0 / 15.0));

  // Same nurse twice in a day violates.
  vars[inst.var_index(0, 1)] = 1.0;
  vars[inst.var_index(1, 1)] = 0.0;
  CHECK_THROWS_AS(inst.evaluate(0, vars), ConstraintViolation);
}

TEST_CASE("tap: hungarian oracle") {
  CHECK(tap_hungarian(TapInstance({"a1", "a2"}, {"t1", "t2"}, {{1, 10}, {10, 1}}))
            .total_cost == doctest::Approx(2.0));

  // Permutation-structured costs admit a zero assignment.
  TapInstance perm({"a1", "a2", "a3"}, {"t1", "t2", "t3"},
                   {{5, 0, 5}, {0, 5, 5}, {5, 5, 0}});
  CHECK(tap_hungarian(perm).total_cost == doctest::Approx(0.0));

  // Random 8x8 matrices agree with the MILP min-sum optimum.
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 8;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (auto& row : cost) {
      for (double& c : row) c = static_cast<double>(rng() % 50);
    }
    std::vector<std::string> agents, tasks;
    for (std::size_t i = 0; i < n; ++i) {
      agents.push_back("a" + std::to_string(i));
      tasks.push_back("t" + std::to_string(i));
    }
    TapInstance inst(agents, tasks, cost);
    const double hungarian = tap_hungarian(inst).total_cost;

    TapSequenceInstance seq({inst});
    MilpBuildSpec spec;
    spec.horizon = 1;
    MilpPlan plan = seq.build_milp(spec);
    const auto result = milp::branch_and_bound(plan.model, plan.separator);
    REQUIRE(result.status == milp::SolveStatus::Optimal);
    CHECK(-result.objective_value == doctest::Approx(hungarian));
  }
}

TEST_CASE("tap: validation") {
  CHECK_THROWS_AS(TapInstance({"a1"}, {"t1", "t2"}, {{1, 2}}), ArgumentError);
  TapInstance ok({"a1", "a2"}, {"t1", "t2"}, {{1, 2}, {3, 4}});
  TapSequenceInstance seq({ok});
  std::vector<double> vars{1, 0, 1, 0}; // task t1 assigned twice
  CHECK_THROWS_AS(seq.evaluate(0, vars), ConstraintViolation);
  vars = {1, 0, 0, 1};
  const StepSolution sol = seq.evaluate(0, vars);
  CHECK(sol.raw_quality == doctest::Approx(5.0));
  CHECK(sol.quality == doctest::Approx(-5.0));
  CHECK(sol.utilities == std::vector<double>{1.0, 4.0});
}

TEST_CASE("vrp: structure validation") {
  CHECK_THROWS_AS(VrpInstance(5, {2, 2}, {{1, 1}}, 2), InfeasibleError);
  CHECK_THROWS_AS(VrpInstance(5, {2, 2}, {{2, 2}}, 1), ArgumentError);
  CHECK_THROWS_AS(VrpInstance(5, {2, 2}, {{1, 1}, {1, 1}}, 1), ArgumentError);

  VrpInstance inst(5, {2, 2}, {{0, 0}, {4, 4}}, 1);
  CHECK(inst.distance(0, 0) == 0.0);
  CHECK(inst.distance(1, 2) == doctest::Approx(inst.distance(2, 1)));
  // Index round-trip over all arcs.
  for (std::size_t idx = 0; idx < inst.n_arcs(); ++idx) {
    std::size_t v, a, b;
    inst.arc_of(idx, v, a, b);
    CHECK(inst.arc_index(v, a, b) == idx);
    CHECK(a != b);
  }
}

TEST_CASE("vrp: forced out-and-back with two vehicles and two points") {
  VrpInstance inst(9, {4, 4}, {{0, 4}, {8, 4}}, 2);
  MilpBuildSpec spec;
  MilpPlan plan = inst.build_milp(spec);
  milp::BranchAndBoundOptions opts;
  opts.initial_incumbent = plan.incumbent_hint;
  const auto result = milp::branch_and_bound(plan.model, plan.separator, opts);
  REQUIRE(result.status == milp::SolveStatus::Optimal);
  CHECK(-result.objective_value == doctest::Approx(16.0)); // two 4+4 loops
  const auto steps = plan.decode(result.assignment);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].utilities[0] == doctest::Approx(8.0));
  CHECK(steps[0].utilities[1] == doctest::Approx(8.0));
}

TEST_CASE("vrp: single vehicle tour equals brute force") {
  // Unit square corners around a center depot.
  VrpInstance inst(5, {2, 2}, {{1, 1}, {1, 3}, {3, 1}, {3, 3}}, 1);
  MilpBuildSpec spec;
  MilpPlan plan = inst.build_milp(spec);
  milp::BranchAndBoundOptions opts;
  opts.initial_incumbent = plan.incumbent_hint;
  const auto result = milp::branch_and_bound(plan.model, plan.separator, opts);
  REQUIRE(result.status == milp::SolveStatus::Optimal);
  CHECK(result.objective_value ==
        doctest::Approx(vrp_brute_force(inst, 0.0, false, {})));
  // The optimal tour needs subtour cuts to be found, so LP solves > nodes.
  const auto routes = inst.routes_of(plan.decode(result.assignment)[0].vars);
  CHECK(routes[0].size() == 4);
}

TEST_CASE("vrp: random small instances match brute force, with and without fairness") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 12; ++trial) {
    const int n_points = 4 + static_cast<int>(rng() % 3); // 4..6
    const int n_vehicles = 1 + static_cast<int>(rng() % 2);
    std::vector<std::pair<int, int>> pts;
    while (static_cast<int>(pts.size()) < n_points) {
      std::pair<int, int> p{static_cast<int>(rng() % 9), static_cast<int>(rng() % 9)};
      if (p == std::pair<int, int>{4, 4}) continue;
      if (std::find(pts.begin(), pts.end(), p) != pts.end()) continue;
      pts.push_back(p);
    }
    VrpInstance inst(9, {4, 4}, pts, n_vehicles);

    MilpBuildSpec spec;
    spec.include_fairness = trial % 2 == 1;
    spec.metric = Metric::MaxMinGap;
    spec.beta = 2.0;
    if (spec.include_fairness) {
      for (int v = 0; v < n_vehicles; ++v) {
        spec.offsets.push_back(static_cast<double>(rng() % 20));
      }
    }
    MilpPlan plan = inst.build_milp(spec);
    milp::BranchAndBoundOptions opts;
    opts.initial_incumbent = plan.incumbent_hint;
    const auto result = milp::branch_and_bound(plan.model, plan.separator, opts);
    REQUIRE(result.status == milp::SolveStatus::Optimal);
    const double oracle =
        vrp_brute_force(inst, spec.beta, spec.include_fairness, spec.offsets);
    CHECK(result.objective_value == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("instance files round-trip") {
  SUBCASE("cap") {
    CapInstance inst({"l1", "l2"}, {"c1", "c2", "c3"},
                     {{2.0, 1.5, 0.25}, {1.0, 1.0, 1.0}}, 6.0, {{}, {1}});
    std::ostringstream out;
    write_cap(inst, out);
    std::istringstream in(out.str());
    const CapInstance back = parse_cap(in);
    std::ostringstream out2;
    write_cap(back, out2);
    CHECK(out.str() == out2.str());
    CHECK(back.skill() == inst.skill());
    CHECK_FALSE(back.available(1, 1));
  }
  SUBCASE("vrp") {
    VrpInstance inst(21, {10, 10}, {{1, 2}, {20, 3}, {7, 19}}, 2);
    std::ostringstream out;
    write_vrp(inst, out);
    std::istringstream in(out.str());
    const VrpInstance back = parse_vrp(in);
    std::ostringstream out2;
    write_vrp(back, out2);
    CHECK(out.str() == out2.str());
    CHECK(back.n_vehicles() == 2);
  }
  SUBCASE("tap") {
    TapInstance inst({"a1", "a2"}, {"t1", "t2"}, {{5.0, 20.0}, {30.0, 5.0}});
    std::ostringstream out;
    write_tap(inst, out);
    std::istringstream in(out.str());
    const TapInstance back = parse_tap(in);
    std::ostringstream out2;
    write_tap(back, out2);
    CHECK(out.str() == out2.str());
    CHECK(back.cost == inst.cost);
  }
  SUBCASE("nsp") {
    NspInstance inst({"n1", "n2"}, 2, {1.0, 0.5}, {{3, 0, 3, 0}, {1, 2, 1, 2}}, 6.0);
    std::ostringstream out;
    write_nsp(inst, out);
    std::istringstream in(out.str());
    const NspInstance back = parse_nsp(in);
    std::ostringstream out2;
    write_nsp(back, out2);
    CHECK(out.str() == out2.str());
  }
  SUBCASE("malformed input") {
    std::istringstream in("cap lecturers 2 l1");
    CHECK_THROWS_AS(parse_cap(in), StructuralError);
  }
}
