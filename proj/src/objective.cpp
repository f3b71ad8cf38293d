#include "tempofair/objective.hpp"

#include <algorithm>
#include <cmath>

#include "tempofair/errors.hpp"
#include "tempofair/milp/solver.hpp"

namespace tempofair {

const char* formulation_name(FormulationKind k) {
  switch (k) {
    case FormulationKind::OP: return "op";
    case FormulationKind::FOP: return "fop";
    case FormulationKind::HFOP: return "hfop";
    case FormulationKind::DHFOP: return "dhfop";
    case FormulationKind::MSDHFOP: return "msdhfop";
  }
  throw ArgumentError("unknown formulation");
}

FormulationKind formulation_from_name(const std::string& name) {
  if (name == "op") return FormulationKind::OP;
  if (name == "fop") return FormulationKind::FOP;
  if (name == "hfop") return FormulationKind::HFOP;
  if (name == "dhfop") return FormulationKind::DHFOP;
  if (name == "msdhfop") return FormulationKind::MSDHFOP;
  throw ArgumentError("unknown formulation: " + name);
}

FormulationSpec::FormulationSpec(FormulationKind kind_, Metric metric_, double beta_,
                                 double gamma, double tau, int horizon_)
    : kind(kind_), beta(beta_), disc(gamma, tau), horizon(horizon_), metric(metric_) {
  if (!(beta >= 0.0)) throw ArgumentError("formulation: beta must be >= 0");
  if (horizon < 1) throw ArgumentError("formulation: horizon must be >= 1");
  if (kind == FormulationKind::OP) beta = 0.0;
  if (kind != FormulationKind::MSDHFOP) horizon = 1;
  if (kind == FormulationKind::OP || kind == FormulationKind::FOP ||
      kind == FormulationKind::HFOP) {
    disc = DiscountSpec(1.0, 1.0);
  }
}

double canonical_fairness(Metric m, double raw) {
  return higher_is_fairer(m) ? raw : -raw;
}

namespace {

void check_history_entities(const History& history, const DomainInstance& instance) {
  if (!history.empty() && history.entities() != instance.entities()) {
    throw StructuralError("history entities do not match the instance's");
  }
}

std::vector<double> tau_powers(double tau, int horizon) {
  std::vector<double> w(static_cast<std::size_t>(horizon));
  double acc = 1.0;
  for (int k = 0; k < horizon; ++k) {
    w[static_cast<std::size_t>(k)] = acc;
    acc *= tau;
  }
  return w;
}

} // namespace

ScoredPlan score(const FormulationSpec& spec, const History& history,
                 const std::vector<StepSolution>& plan,
                 const DomainInstance& instance, int first_step) {
  if (static_cast<int>(plan.size()) != spec.horizon) {
    throw ArgumentError("score: plan length must equal the horizon (" +
                        std::to_string(spec.horizon) + ")");
  }
  if (spec.uses_history()) check_history_entities(history, instance);

  ScoredPlan out;
  const std::vector<double> w = tau_powers(spec.disc.tau, spec.horizon);
  for (int k = 0; k < spec.horizon; ++k) {
    const StepSolution checked =
        instance.evaluate(first_step + k, plan[static_cast<std::size_t>(k)].vars);
    out.quality_term += w[static_cast<std::size_t>(k)] * checked.quality;
    out.per_step_utilities.push_back(
        UtilityVector(instance.entities(), checked.utilities));
    out.plan.push_back(std::move(checked));
  }

  if (spec.kind == FormulationKind::OP) {
    out.fairness_term = 0.0;
  } else {
    static const History kEmptyHistory;
    const History& hist_eff = spec.uses_history() ? history : kEmptyHistory;
    const double raw = metric_temporal(spec.metric, hist_eff, out.per_step_utilities,
                                       spec.disc);
    out.fairness_term = canonical_fairness(spec.metric, raw);
  }
  out.total = out.quality_term + spec.effective_beta() * out.fairness_term;
  return out;
}

namespace {

ScoredPlan solve_enumeration(const FormulationSpec& spec, const History& history,
                             const DomainInstance& instance, int first_step) {
  const std::size_t n_entities = instance.entities().size();
  const bool use_hist = spec.uses_history() && !history.empty();
  const std::vector<double> offsets =
      use_hist ? discounted_history_offsets(history, spec.disc.gamma)
               : std::vector<double>(n_entities, 0.0);
  const double beta = spec.effective_beta();
  const bool fairness_on = spec.kind != FormulationKind::OP;

  std::vector<StepSolution> best_plan;
  double best_total = -std::numeric_limits<double>::infinity();
  bool found = false;

  if (spec.horizon == 1) {
    std::vector<double> totals(n_entities);
    instance.enumerate(first_step, [&](const StepSolution& cand) {
      double total = cand.quality;
      if (fairness_on) {
        for (std::size_t e = 0; e < n_entities; ++e) {
          totals[e] = offsets[e] + cand.utilities[e];
        }
        total += beta * canonical_fairness(spec.metric,
                                           metric_value(spec.metric, totals));
      }
      if (!found || total > best_total) {
        found = true;
        best_total = total;
        best_plan.assign(1, cand);
      }
      return true;
    });
  } else {
    // Materialize each step's candidates, then walk the product in
    // lexicographic order. Partial sums are stacked per level (not undone in
    // place) so leaf totals match score()'s left-to-right accumulation
    // exactly.
    std::vector<std::vector<StepSolution>> levels(
        static_cast<std::size_t>(spec.horizon));
    for (int k = 0; k < spec.horizon; ++k) {
      auto& level = levels[static_cast<std::size_t>(k)];
      instance.enumerate(first_step + k, [&](const StepSolution& cand) {
        level.push_back(cand);
        return true;
      });
      if (level.empty()) {
        throw InfeasibleError("no feasible candidate at step " +
                              std::to_string(first_step + k));
      }
      if (level.size() > 2'000'000) {
        throw ArgumentError("enumeration backend: candidate set too large for a "
                            "multi-step horizon");
      }
    }
    const std::vector<double> w = tau_powers(spec.disc.tau, spec.horizon);
    std::vector<std::vector<double>> totals_stack(
        static_cast<std::size_t>(spec.horizon) + 1);
    totals_stack[0] = offsets;
    std::vector<double> quality_stack(static_cast<std::size_t>(spec.horizon) + 1, 0.0);
    std::vector<const StepSolution*> current(static_cast<std::size_t>(spec.horizon));

    std::function<void(int)> rec = [&](int k) {
      if (k == spec.horizon) {
        double total = quality_stack[static_cast<std::size_t>(k)];
        if (fairness_on) {
          total += beta * canonical_fairness(
                              spec.metric,
                              metric_value(spec.metric,
                                           totals_stack[static_cast<std::size_t>(k)]));
        }
        if (!found || total > best_total) {
          found = true;
          best_total = total;
          best_plan.clear();
          for (const StepSolution* s : current) best_plan.push_back(*s);
        }
        return;
      }
      const std::size_t ks = static_cast<std::size_t>(k);
      for (const StepSolution& cand : levels[ks]) {
        current[ks] = &cand;
        quality_stack[ks + 1] = quality_stack[ks] + w[ks] * cand.quality;
        totals_stack[ks + 1] = totals_stack[ks];
        for (std::size_t e = 0; e < n_entities; ++e) {
          totals_stack[ks + 1][e] += w[ks] * cand.utilities[e];
        }
        rec(k + 1);
      }
    };
    rec(0);
  }

  if (!found) throw InfeasibleError("no feasible plan");
  return score(spec, history, best_plan, instance, first_step);
}

ScoredPlan solve_milp(const FormulationSpec& spec, const History& history,
                      const DomainInstance& instance, int first_step) {
  const bool use_hist = spec.uses_history() && !history.empty();
  MilpBuildSpec build;
  build.first_step = first_step;
  build.horizon = spec.horizon;
  build.include_fairness = spec.kind != FormulationKind::OP;
  build.metric = spec.metric;
  build.beta = spec.effective_beta();
  build.tau = spec.disc.tau;
  if (use_hist) build.offsets = discounted_history_offsets(history, spec.disc.gamma);

  MilpPlan plan = instance.build_milp(build);
  milp::BranchAndBoundOptions options;
  options.initial_incumbent = plan.incumbent_hint;
  options.branch_priority = plan.branch_priority;
  options.strong_branch_budget = plan.strong_branch_budget;
  const milp::SolveResult result =
      milp::branch_and_bound(plan.model, plan.separator, options);
  if (result.status == milp::SolveStatus::Infeasible) {
    throw InfeasibleError("integer program infeasible");
  }
  if (result.status != milp::SolveStatus::Optimal) {
    throw NumericalError(std::string("integer program not solved to optimality: ") +
                         milp::status_name(result.status));
  }
  ScoredPlan out = score(spec, history, plan.decode(result.assignment), instance,
                         first_step);
  out.node_count = result.node_count;
  out.lp_count = result.lp_count;
  return out;
}

} // namespace

ScoredPlan solve(const FormulationSpec& spec, const History& history,
                 const DomainInstance& instance, Backend backend, int first_step) {
  if (spec.uses_history()) check_history_entities(history, instance);
  Backend effective = backend == Backend::Auto ? instance.natural_backend() : backend;
  switch (effective) {
    case Backend::Enumeration:
      return solve_enumeration(spec, history, instance, first_step);
    case Backend::Milp:
      return solve_milp(spec, history, instance, first_step);
    case Backend::Auto:
      break;
  }
  throw ArgumentError("solve: unresolved backend");
}

std::vector<ScoredPlan> rolling_run(const FormulationSpec& spec,
                                    const History& initial_history,
                                    const std::vector<PlanStepRef>& steps,
                                    Backend backend) {
  std::vector<ScoredPlan> out;
  History history = initial_history;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const PlanStepRef& ref = steps[k];
    if (ref.instance == nullptr) {
      throw ArgumentError("rolling_run: null instance reference");
    }

    FormulationSpec step_spec = spec;
    if (spec.kind == FormulationKind::MSDHFOP && spec.horizon > 1) {
      // Receding horizon, clamped at the end of the run. The window must be
      // consecutive steps of one instance.
      int h = std::min<int>(spec.horizon, static_cast<int>(steps.size() - k));
      for (int j = 1; j < h; ++j) {
        const PlanStepRef& nxt = steps[k + static_cast<std::size_t>(j)];
        if (nxt.instance != ref.instance || nxt.step != ref.step + j) {
          h = j;
          break;
        }
      }
      step_spec.horizon = h;
    }

    ScoredPlan solved = solve(step_spec, history, *ref.instance, backend, ref.step);
    history.steps.push_back(solved.per_step_utilities.front());
    if (history.steps.size() > 1 &&
        history.steps.front().entities != history.steps.back().entities) {
      throw StructuralError("rolling_run: instances disagree on entities");
    }
    out.push_back(std::move(solved));
  }
  return out;
}

} // namespace tempofair
