#include "doctest.h"

#include <cmath>

#include "tempofair/domains/cap.hpp"
#include "tempofair/domains/tap.hpp"
#include "tempofair/errors.hpp"
#include "tempofair/objective.hpp"

using namespace tempofair;

namespace {

// Two lecturers, three courses per semester, no quality signal: the running
// teaching example.
CapInstance running_cap() {
  return CapInstance({"l1", "l2"}, {"c1", "c2", "c3"},
                     {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, 1.0);
}

History running_history() {
  std::vector<std::string> names{"l1", "l2"};
  return History({UtilityVector(names, {2.0, 1.0}), UtilityVector(names, {1.5, 1.5}),
                  UtilityVector(names, {3.0, 0.0}), UtilityVector(names, {2.0, 1.0})});
}

// Three lecturers with skills 2 / 1.5 / 0 on two courses; quality normalized
// by 4. The beta-sweep fixture.
CapInstance sweep_cap() {
  return CapInstance({"l1", "l2", "l3"}, {"c1", "c2"},
                     {{2.0, 2.0}, {1.5, 1.5}, {0.0, 0.0}}, 4.0);
}

// Two lecturers (skills 2 and 1), two courses, un-normalized quality, with
// lecturer 1 on sabbatical at steps 2 and 3. The forecast fixture.
CapInstance forecast_cap() {
  return CapInstance({"l1", "l2"}, {"c1", "c2"}, {{2.0, 2.0}, {1.0, 1.0}}, 1.0,
                     {{}, {}, {0}, {0}});
}

} // namespace

TEST_CASE("canonical fairness orientation") {
  CHECK(canonical_fairness(Metric::RelativeMaxMin, 0.87) == doctest::Approx(0.87));
  CHECK(canonical_fairness(Metric::MaxMinGap, 45.3) == doctest::Approx(-45.3));
  CHECK(canonical_fairness(Metric::MinimaxCost, 30.0) == doctest::Approx(-30.0));
  CHECK(canonical_fairness(Metric::QuadraticMaxMinGap, -0.25) ==
        doctest::Approx(-0.25));
}

TEST_CASE("formulation spec normalization") {
  const FormulationSpec op(FormulationKind::OP, Metric::RelativeMaxMin, 7.0, 0.5,
                           0.25, 4);
  CHECK(op.effective_beta() == 0.0);
  CHECK(op.horizon == 1);
  CHECK(op.disc.gamma == 1.0);
  CHECK(op.disc.tau == 1.0);

  const FormulationSpec hfop(FormulationKind::HFOP, Metric::RelativeMaxMin, 2.0, 0.5,
                             0.25, 3);
  CHECK(hfop.disc.gamma == 1.0);
  CHECK(hfop.horizon == 1);

  const FormulationSpec ms(FormulationKind::MSDHFOP, Metric::MaximinRatio, 2.0, 0.75,
                           0.75, 6);
  CHECK(ms.horizon == 6);
  CHECK(ms.disc.gamma == 0.75);

  CHECK_THROWS_AS(FormulationSpec(FormulationKind::FOP, Metric::RelativeMaxMin, -1.0),
                  ArgumentError);
  for (FormulationKind k : {FormulationKind::OP, FormulationKind::FOP,
                            FormulationKind::HFOP, FormulationKind::DHFOP,
                            FormulationKind::MSDHFOP}) {
    CHECK(formulation_from_name(formulation_name(k)) == k);
  }
}

TEST_CASE("solve: running example, fairness only") {
  const CapInstance cap = running_cap();
  const FormulationSpec hfop(FormulationKind::HFOP, Metric::RelativeMaxMin, 1.0);
  const FormulationSpec fop(FormulationKind::FOP, Metric::RelativeMaxMin, 1.0);

  History hist = running_history();

  // The history-aware rung compensates: all courses to l2, then a half.
  ScoredPlan t0 = solve(hfop, hist, cap);
  CHECK(t0.per_step_utilities[0].values == std::vector<double>{0.0, 3.0});
  CHECK(t0.fairness_term == doctest::Approx(1.0 - 2.0 / 15.0));

  hist.steps.push_back(t0.per_step_utilities[0]);
  ScoredPlan t1 = solve(hfop, hist, cap);
  CHECK(t1.per_step_utilities[0].values == std::vector<double>{0.5, 2.5});
  CHECK(t1.fairness_term == doctest::Approx(1.0));

  hist.steps.push_back(t1.per_step_utilities[0]);
  for (int k = 2; k < 5; ++k) {
    ScoredPlan tk = solve(hfop, hist, cap);
    CHECK(tk.per_step_utilities[0].values == std::vector<double>{1.5, 1.5});
    CHECK(tk.fairness_term == doctest::Approx(1.0));
    hist.steps.push_back(tk.per_step_utilities[0]);
  }

  // The history-blind rung always balances.
  ScoredPlan fop_sol = solve(fop, running_history(), cap);
  CHECK(fop_sol.per_step_utilities[0].values == std::vector<double>{1.5, 1.5});
  CHECK(fop_sol.fairness_term == doctest::Approx(1.0));
}

TEST_CASE("solve: single feasible point") {
  CapInstance one({"l1"}, {"c1"}, {{1.0}}, 1.0);
  for (FormulationKind k : {FormulationKind::OP, FormulationKind::FOP,
                            FormulationKind::HFOP}) {
    const FormulationSpec spec(k, Metric::RelativeMaxMin, 2.0);
    const ScoredPlan sol = solve(spec, History{}, one);
    CHECK(sol.per_step_utilities[0].values == std::vector<double>{1.0});
  }
}

TEST_CASE("score: validates plans and reproduces solver totals bit-exactly") {
  const CapInstance cap = sweep_cap();
  const FormulationSpec spec(FormulationKind::HFOP, Metric::QuadraticMaxMinGap, 2.0);
  const History hist;

  const ScoredPlan solved = solve(spec, hist, cap);
  const ScoredPlan rescored = score(spec, hist, solved.plan, cap);
  CHECK(rescored.total == solved.total); // bitwise
  CHECK(rescored.quality_term == solved.quality_term);
  CHECK(rescored.fairness_term == solved.fairness_term);

  // Length mismatch.
  CHECK_THROWS_AS(score(spec, hist, {}, cap), ArgumentError);

  // Infeasible step: course load 2 on one course.
  StepSolution bad = solved.plan[0];
  std::fill(bad.vars.begin(), bad.vars.end(), 0.0);
  bad.vars[cap.var_index(0, 0)] = 1.0;
  bad.vars[cap.var_index(1, 0)] = 1.0;
  bad.vars[cap.var_index(0, 1)] = 1.0;
  CHECK_THROWS_AS(score(spec, hist, {bad}, cap), ConstraintViolation);
}

TEST_CASE("rolling runs: beta sweep anchors") {
  const CapInstance cap = sweep_cap();
  const std::vector<PlanStepRef> steps(10, PlanStepRef{&cap, 0});

  SUBCASE("beta = 0.125 starts greedy") {
    const FormulationSpec spec(FormulationKind::HFOP, Metric::QuadraticMaxMinGap,
                               0.125);
    const auto run = rolling_run(spec, History{}, steps);
    REQUIRE(run.size() == 10);
    CHECK(run[0].plan[0].quality == doctest::Approx(1.0));
    CHECK(qmmg(run[0].per_step_utilities[0]) == doctest::Approx(-1.0));
  }
  SUBCASE("beta = 2 holds the instantaneous gap at 0.5") {
    const FormulationSpec spec(FormulationKind::HFOP, Metric::QuadraticMaxMinGap, 2.0);
    const auto run = rolling_run(spec, History{}, steps);
    for (const ScoredPlan& sp : run) {
      CHECK(qmmg(sp.per_step_utilities[0]) == doctest::Approx(-0.0625));
    }
    // Quality pattern from the panel: 0.6875, 0.625, 0.4375 repeating.
    CHECK(run[0].plan[0].quality == doctest::Approx(0.6875));
    CHECK(run[1].plan[0].quality == doctest::Approx(0.625));
    CHECK(run[2].plan[0].quality == doctest::Approx(0.4375));
    CHECK(run[3].plan[0].quality == doctest::Approx(0.6875));
  }
  SUBCASE("monotone trade-off across beta") {
    double prev_q = 2.0, prev_f = -100.0;
    for (double beta : {0.125, 0.25, 0.75, 2.0}) {
      const FormulationSpec spec(FormulationKind::HFOP, Metric::QuadraticMaxMinGap,
                                 beta);
      const auto run = rolling_run(spec, History{}, steps);
      double mean_q = 0.0, mean_f = 0.0;
      for (const ScoredPlan& sp : run) {
        mean_q += sp.plan[0].quality;
        mean_f += qmmg(sp.per_step_utilities[0]);
      }
      mean_q /= 10.0;
      mean_f /= 10.0;
      CHECK(mean_q < prev_q);
      CHECK(mean_f > prev_f);
      prev_q = mean_q;
      prev_f = mean_f;
    }
  }
  SUBCASE("zero steps yield an empty run") {
    const FormulationSpec spec(FormulationKind::HFOP, Metric::QuadraticMaxMinGap, 2.0);
    CHECK(rolling_run(spec, History{}, {}).empty());
  }
}

TEST_CASE("planning ahead beats single-shot on the forecast fixture") {
  const CapInstance cap = forecast_cap();

  // Receding single-shot play.
  const FormulationSpec hfop(FormulationKind::HFOP, Metric::MaximinRatio, 2.0);
  std::vector<PlanStepRef> steps;
  for (int k = 0; k < 4; ++k) steps.push_back({&cap, k});
  const auto rolled = rolling_run(hfop, History{}, steps);
  double sum_q = 0.0;
  std::vector<UtilityVector> realized;
  for (const ScoredPlan& sp : rolled) {
    sum_q += sp.plan[0].quality;
    realized.push_back(sp.per_step_utilities[0]);
  }
  CHECK(sum_q == doctest::Approx(10.0));
  CHECK(maximin_ratio_temporal(History{}, realized, DiscountSpec(1, 1)) ==
        doctest::Approx(1.0 / 3.0));
  CHECK(rolled[0].per_step_utilities[0].values == std::vector<double>{1.0, 1.0});

  // Planning all four steps at once uses the sabbatical forecast.
  const FormulationSpec ms(FormulationKind::MSDHFOP, Metric::MaximinRatio, 2.0, 1.0,
                           1.0, 4);
  const ScoredPlan plan = solve(ms, History{}, cap);
  CHECK(plan.quality_term == doctest::Approx(12.0));
  CHECK(plan.fairness_term == doctest::Approx(1.0));
  CHECK(plan.per_step_utilities[0].values == std::vector<double>{2.0, 0.0});
  CHECK(plan.per_step_utilities[2].values == std::vector<double>{0.0, 2.0});
}

TEST_CASE("reductions between rungs") {
  const CapInstance cap = sweep_cap();
  const History hist = History({UtilityVector({"l1", "l2", "l3"}, {2.0, 0.0, 1.0})});

  SUBCASE("beta = 0 reduces every rung to the plain argmax") {
    const FormulationSpec op(FormulationKind::OP, Metric::QuadraticMaxMinGap);
    const ScoredPlan op_sol = solve(op, hist, cap);
    for (FormulationKind k : {FormulationKind::FOP, FormulationKind::HFOP,
                              FormulationKind::DHFOP}) {
      const FormulationSpec spec(k, Metric::QuadraticMaxMinGap, 0.0, 0.5, 1.0);
      CHECK(solve(spec, hist, cap).plan[0].vars == op_sol.plan[0].vars);
    }
  }
  SUBCASE("single-step undiscounted multi-step rung equals the history rung") {
    const FormulationSpec ms(FormulationKind::MSDHFOP, Metric::QuadraticMaxMinGap,
                             0.75, 1.0, 1.0, 1);
    const FormulationSpec hfop(FormulationKind::HFOP, Metric::QuadraticMaxMinGap,
                               0.75);
    CHECK(solve(ms, hist, cap).plan[0].vars == solve(hfop, hist, cap).plan[0].vars);
  }
  SUBCASE("argmax is invariant to scaling quality and fairness together") {
    const FormulationSpec spec(FormulationKind::HFOP, Metric::QuadraticMaxMinGap,
                               0.25);
    const ScoredPlan base = solve(spec, hist, cap);
    // Scale quality by c via q_max and fairness by c via beta... the metric
    // itself is quadratic, so scale beta only: c * (Q + beta F) needs both
    // terms scaled; emulate by scaling beta and q_max consistently.
    CapInstance scaled({"l1", "l2", "l3"}, {"c1", "c2"},
                       {{2.0, 2.0}, {1.5, 1.5}, {0.0, 0.0}}, 4.0 / 3.0);
    const FormulationSpec spec_scaled(FormulationKind::HFOP,
                                      Metric::QuadraticMaxMinGap, 0.25 * 3.0);
    CHECK(solve(spec_scaled, hist, scaled).plan[0].vars == base.plan[0].vars);
  }
}

TEST_CASE("solve: OP ignores beta and reports zero fairness") {
  const CapInstance cap = sweep_cap();
  const FormulationSpec op(FormulationKind::OP, Metric::QuadraticMaxMinGap, 99.0);
  const ScoredPlan sol = solve(op, History{}, cap);
  CHECK(sol.fairness_term == 0.0);
  CHECK(sol.total == sol.quality_term);
  CHECK(sol.plan[0].quality == doctest::Approx(1.0));
}

TEST_CASE("solve: MILP backend through the objective layer") {
  TapInstance tap({"a1", "a2"}, {"t1", "t2"}, {{1.0, 10.0}, {10.0, 1.0}});
  TapSequenceInstance seq({tap});
  const FormulationSpec op(FormulationKind::OP, Metric::MinimaxCost);
  const ScoredPlan sol = solve(op, History{}, seq);
  CHECK(sol.quality_term == doctest::Approx(-2.0));
  CHECK(sol.plan[0].raw_quality == doctest::Approx(2.0));
  CHECK(sol.node_count >= 1);

  // History-aware minimax: the indebted agent gets the cheap task.
  TapInstance tap2({"a1", "a2"}, {"t1", "t2"}, {{5.0, 5.0}, {5.0, 30.0}});
  TapSequenceInstance seq2({tap2});
  const History hist({UtilityVector({"a1", "a2"}, {100.0, 0.0})});
  const FormulationSpec hfop(FormulationKind::HFOP, Metric::MinimaxCost, 10.0);
  const ScoredPlan fair = solve(hfop, hist, seq2);
  CHECK(fair.per_step_utilities[0].values == std::vector<double>{5.0, 5.0});
  CHECK(fair.fairness_term == doctest::Approx(-105.0));
}

TEST_CASE("history entity mismatch is structural") {
  const CapInstance cap = sweep_cap();
  const History wrong({UtilityVector({"x", "y"}, {1.0, 2.0})});
  const FormulationSpec hfop(FormulationKind::HFOP, Metric::QuadraticMaxMinGap, 1.0);
  CHECK_THROWS_AS(solve(hfop, wrong, cap), StructuralError);
}
