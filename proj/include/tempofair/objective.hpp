/**
 * @file objective.hpp
 * @brief The five formulation rungs assembled into one scoring contract.
 *
 * Every formulation maximizes  sum_t tau^t Q(x_t) + beta * F(...)  where F is
 * the chosen metric's temporal variant folded over (history, plan) and
 * canonicalized so that larger is always fairer. Plain formulations are the
 * degenerate cases: no history (OP/FOP), no discounting (HFOP), single step
 * (everything except the multi-step rung).
 */

#ifndef TEMPOFAIR_OBJECTIVE_HPP
#define TEMPOFAIR_OBJECTIVE_HPP

#include "tempofair/domains/instance.hpp"
#include "tempofair/fairness.hpp"

namespace tempofair {

enum class FormulationKind { OP, FOP, HFOP, DHFOP, MSDHFOP };

const char* formulation_name(FormulationKind k);
FormulationKind formulation_from_name(const std::string& name);

/// Which rung, its trade-off weight, discounting, horizon and metric.
/// Construction normalizes the fields the rung ignores: OP zeroes beta,
/// single-shot rungs force horizon 1, undiscounted rungs force gamma=tau=1.
struct FormulationSpec {
  FormulationKind kind = FormulationKind::OP;
  double beta = 0.0;
  DiscountSpec disc;
  int horizon = 1;
  Metric metric = Metric::RelativeMaxMin;

  FormulationSpec() = default;
  FormulationSpec(FormulationKind kind_, Metric metric_, double beta_ = 0.0,
                  double gamma = 1.0, double tau = 1.0, int horizon_ = 1);

  bool uses_history() const {
    return kind == FormulationKind::HFOP || kind == FormulationKind::DHFOP ||
           kind == FormulationKind::MSDHFOP;
  }
  double effective_beta() const { return kind == FormulationKind::OP ? 0.0 : beta; }
};

/// A solved or externally supplied plan with its score decomposition.
/// total = quality_term + effective_beta * fairness_term, with exactly the
/// arithmetic score() uses, so re-scoring a solve() result reproduces its
/// total bit for bit.
struct ScoredPlan {
  std::vector<StepSolution> plan;
  double quality_term = 0.0;
  double fairness_term = 0.0;
  double total = 0.0;
  std::vector<UtilityVector> per_step_utilities;
  long node_count = 0;
  long lp_count = 0;
};

/// Maps a metric's native value onto the maximize orientation: fair-is-high
/// metrics pass through, cost-style metrics are negated.
double canonical_fairness(Metric m, double raw);

/// Scores a feasible plan. Each step is validated against the instance
/// (ConstraintViolation names the offending step and constraint); quality and
/// utilities are recomputed from the assignments. Plan length must equal the
/// spec's horizon.
ScoredPlan score(const FormulationSpec& spec, const History& history,
                 const std::vector<StepSolution>& plan,
                 const DomainInstance& instance, int first_step = 0);

/// Returns a feasible plan maximizing the formulation's total. Enumeration
/// backends break ties toward the lexicographically smallest plan in the
/// instance's canonical candidate order; the MILP backend is deterministic.
ScoredPlan solve(const FormulationSpec& spec, const History& history,
                 const DomainInstance& instance, Backend backend = Backend::Auto,
                 int first_step = 0);

/// One planning step of a rolling run: an instance and the step index into
/// that instance's timeline.
struct PlanStepRef {
  const DomainInstance* instance = nullptr;
  int step = 0;
};

/// Solves step after step, committing one solution per iteration and
/// appending its realized utilities to the history (receding horizon for the
/// multi-step rung: only the first planned step is committed). Returns one
/// ScoredPlan per iteration.
std::vector<ScoredPlan> rolling_run(const FormulationSpec& spec,
                                    const History& initial_history,
                                    const std::vector<PlanStepRef>& steps,
                                    Backend backend = Backend::Auto);

} // namespace tempofair

#endif // TEMPOFAIR_OBJECTIVE_HPP
