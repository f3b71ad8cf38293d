#include "tempofair/domains/tap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tempofair/errors.hpp"
#include "tempofair/milp/linearize.hpp"

namespace tempofair {

namespace {
const std::string kDomainName = "tap";
} // namespace

TapInstance::TapInstance(std::vector<std::string> agents_,
                         std::vector<std::string> tasks_,
                         std::vector<std::vector<double>> cost_)
    : agents(std::move(agents_)), tasks(std::move(tasks_)), cost(std::move(cost_)) {
  if (agents.empty()) throw ArgumentError("tap: needs at least one agent");
  if (agents.size() != tasks.size()) {
    throw ArgumentError("tap: agent and task counts must match");
  }
  if (cost.size() != agents.size()) {
    throw ArgumentError("tap: one cost row per agent required");
  }
  for (const auto& row : cost) {
    if (row.size() != tasks.size()) {
      throw ArgumentError("tap: one cost entry per task required");
    }
    for (double c : row) {
      if (!(c >= 0.0)) throw ArgumentError("tap: costs must be nonnegative");
    }
  }
}

HungarianResult tap_hungarian(const TapInstance& instance) {
  const int n = static_cast<int>(instance.size());
  const auto& a = instance.cost;
  const double inf = std::numeric_limits<double>::infinity();

  // Shortest augmenting paths with potentials; p[j] is the row matched to
  // column j (1-based, 0 = unmatched sentinel).
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = a[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  HungarianResult out;
  out.task_of_agent.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    out.task_of_agent[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  for (int i = 0; i < n; ++i) {
    out.total_cost += a[static_cast<std::size_t>(i)]
                       [static_cast<std::size_t>(out.task_of_agent[static_cast<std::size_t>(i)])];
  }
  return out;
}

TapSequenceInstance::TapSequenceInstance(std::vector<TapInstance> periods)
    : periods_(std::move(periods)) {
  if (periods_.empty()) throw ArgumentError("tap: at least one period required");
  for (const TapInstance& p : periods_) {
    if (p.agents != periods_.front().agents) {
      throw StructuralError("tap: all periods must share the agent list");
    }
    if (p.size() != periods_.front().size()) {
      throw StructuralError("tap: all periods must have the same size");
    }
  }
}

const std::string& TapSequenceInstance::domain_name() const { return kDomainName; }

const std::vector<std::string>& TapSequenceInstance::entities() const {
  return periods_.front().agents;
}

StepSolution TapSequenceInstance::evaluate(int step,
                                           const std::vector<double>& vars) const {
  if (step < 0 || static_cast<std::size_t>(step) >= periods_.size()) {
    throw ArgumentError("tap: step out of range");
  }
  const TapInstance& period = periods_[static_cast<std::size_t>(step)];
  const std::size_t n = period.size();
  if (vars.size() != n * n) throw ArgumentError("tap: assignment vector has wrong size");

  std::vector<int> task_count(n, 0);
  StepSolution sol;
  sol.vars = vars;
  sol.utilities.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    int assigned = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = vars[a * n + t];
      if (v != 0.0 && v != 1.0) {
        throw ConstraintViolation("tap step " + std::to_string(step) +
                                  ": assignments must be 0/1");
      }
      if (v == 1.0) {
        ++assigned;
        ++task_count[t];
        sol.utilities[a] += period.cost[a][t];
      }
    }
    if (assigned != 1) {
      throw ConstraintViolation("tap step " + std::to_string(step) + ": agent " +
                                period.agents[a] + " must take exactly one task");
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (task_count[t] != 1) {
      throw ConstraintViolation("tap step " + std::to_string(step) + ": task " +
                                period.tasks[t] + " must be assigned exactly once");
    }
  }
  for (double u : sol.utilities) sol.raw_quality += u;
  sol.quality = -sol.raw_quality;
  return sol;
}

MilpPlan TapSequenceInstance::build_milp(const MilpBuildSpec& spec) const {
  const std::size_t n = size();
  if (spec.first_step < 0 ||
      static_cast<std::size_t>(spec.first_step + spec.horizon) > periods_.size()) {
    throw ArgumentError("tap: planning window exceeds available periods");
  }
  const std::size_t h = static_cast<std::size_t>(spec.horizon);
  if (!spec.offsets.empty() && spec.offsets.size() != n) {
    throw ArgumentError("tap: one offset per agent required");
  }

  MilpPlan plan;
  milp::LinearModel& m = plan.model;
  m.maximize = true;

  const auto var_of = [n](std::size_t k, std::size_t a, std::size_t t) {
    return static_cast<int>((k * n + a) * n + t);
  };

  std::vector<double> tau_pow(h, 1.0);
  for (std::size_t k = 1; k < h; ++k) tau_pow[k] = tau_pow[k - 1] * spec.tau;

  for (std::size_t k = 0; k < h; ++k) {
    const TapInstance& period = periods_[static_cast<std::size_t>(spec.first_step) + k];
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t t = 0; t < n; ++t) {
        const int var = m.add_variable(
            "x_" + std::to_string(k) + "_" + std::to_string(a) + "_" + std::to_string(t),
            0.0, 1.0, true);
        m.set_objective_coef(var, -tau_pow[k] * period.cost[a][t]);
      }
    }
  }
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      milp::Constraint c;
      c.name = "s" + std::to_string(k) + "_task" + std::to_string(t);
      c.sense = milp::Sense::Equal;
      c.rhs = 1.0;
      for (std::size_t a = 0; a < n; ++a) c.terms.push_back({var_of(k, a, t), 1.0});
      m.add_constraint(std::move(c));
    }
    for (std::size_t a = 0; a < n; ++a) {
      milp::Constraint c;
      c.name = "s" + std::to_string(k) + "_agent" + std::to_string(a);
      c.sense = milp::Sense::Equal;
      c.rhs = 1.0;
      for (std::size_t t = 0; t < n; ++t) c.terms.push_back({var_of(k, a, t), 1.0});
      m.add_constraint(std::move(c));
    }
  }

  if (spec.include_fairness) {
    if (spec.metric != Metric::MinimaxCost) {
      throw ArgumentError("tap: MILP fairness supports the minimax-cost metric");
    }
    std::vector<milp::LinearExpr> exprs(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t k = 0; k < h; ++k) {
        const TapInstance& period =
            periods_[static_cast<std::size_t>(spec.first_step) + k];
        for (std::size_t t = 0; t < n; ++t) {
          const double w = tau_pow[k] * period.cost[a][t];
          if (w != 0.0) exprs[a].terms.push_back({var_of(k, a, t), w});
        }
      }
    }
    std::vector<double> offsets =
        spec.offsets.empty() ? std::vector<double>(n, 0.0) : spec.offsets;
    const int max_var = milp::linearize_minimax(m, exprs, offsets);
    m.set_objective_coef(max_var, -spec.beta);
    // Every agent performs exactly one task per step, so its discounted
    // utility is at least its discounted row minimum; the max over agents is
    // a valid floor for the minimax variable.
    double fair_lb = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      double lo = offsets[a];
      for (std::size_t k = 0; k < h; ++k) {
        const TapInstance& period =
            periods_[static_cast<std::size_t>(spec.first_step) + k];
        lo += tau_pow[k] * *std::min_element(period.cost[a].begin(),
                                             period.cost[a].end());
      }
      fair_lb = std::max(fair_lb, lo);
    }
    if (m.vars[static_cast<std::size_t>(max_var)].is_integer) {
      fair_lb = std::ceil(fair_lb - 1e-9);
      // The minimax level drives the bound: settle it before the x's.
      plan.branch_priority.assign(m.vars.size(), 0);
      plan.branch_priority[static_cast<std::size_t>(max_var)] = 1;
    }
    m.vars[static_cast<std::size_t>(max_var)].lower =
        std::max(m.vars[static_cast<std::size_t>(max_var)].lower, fair_lb);
  }

  plan.decode = [this, n, h, first = spec.first_step,
                 var_of](const std::vector<double>& x) {
    std::vector<StepSolution> steps;
    for (std::size_t k = 0; k < h; ++k) {
      std::vector<double> vars(n * n, 0.0);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t t = 0; t < n; ++t) {
          vars[a * n + t] =
              x[static_cast<std::size_t>(var_of(k, a, t))] > 0.5 ? 1.0 : 0.0;
        }
      }
      steps.push_back(evaluate(first + static_cast<int>(k), vars));
    }
    return steps;
  };

  // Warm incumbent: per-step min-sum assignment, then pairwise task swaps
  // that improve the combined objective.
  {
    std::vector<std::vector<int>> task_of(h);
    for (std::size_t k = 0; k < h; ++k) {
      task_of[k] =
          tap_hungarian(periods_[static_cast<std::size_t>(spec.first_step) + k])
              .task_of_agent;
    }
    std::vector<double> agent_total(n, 0.0);
    const auto cost_of = [&](std::size_t k, std::size_t a) {
      const TapInstance& period = periods_[static_cast<std::size_t>(spec.first_step) + k];
      return period.cost[a][static_cast<std::size_t>(task_of[k][a])];
    };
    double sum_term = 0.0;
    for (std::size_t k = 0; k < h; ++k) {
      for (std::size_t a = 0; a < n; ++a) {
        const double w = tau_pow[k] * cost_of(k, a);
        agent_total[a] += w;
        sum_term += w;
      }
    }
    const bool fair = spec.include_fairness;
    const auto fairness_max = [&]() {
      double mx = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        const double off = spec.offsets.empty() ? 0.0 : spec.offsets[a];
        mx = std::max(mx, off + agent_total[a]);
      }
      return mx;
    };
    double best = -sum_term - (fair ? spec.beta * fairness_max() : 0.0);
    for (int pass = 0; pass < 6; ++pass) {
      bool improved = false;
      for (std::size_t k = 0; k < h; ++k) {
        const TapInstance& period =
            periods_[static_cast<std::size_t>(spec.first_step) + k];
        for (std::size_t a = 0; a + 1 < n; ++a) {
          for (std::size_t b = a + 1; b < n; ++b) {
            const int ta = task_of[k][a], tb = task_of[k][b];
            const double old_a = tau_pow[k] * period.cost[a][static_cast<std::size_t>(ta)];
            const double old_b = tau_pow[k] * period.cost[b][static_cast<std::size_t>(tb)];
            const double new_a = tau_pow[k] * period.cost[a][static_cast<std::size_t>(tb)];
            const double new_b = tau_pow[k] * period.cost[b][static_cast<std::size_t>(ta)];
            agent_total[a] += new_a - old_a;
            agent_total[b] += new_b - old_b;
            const double cand_sum = sum_term + (new_a - old_a) + (new_b - old_b);
            const double cand =
                -cand_sum - (fair ? spec.beta * fairness_max() : 0.0);
            if (cand > best + 1e-9) {
              best = cand;
              sum_term = cand_sum;
              task_of[k][a] = tb;
              task_of[k][b] = ta;
              improved = true;
            } else {
              agent_total[a] -= new_a - old_a;
              agent_total[b] -= new_b - old_b;
            }
          }
        }
      }
      if (!improved) break;
    }

    std::vector<double> hint(m.vars.size(), 0.0);
    for (std::size_t k = 0; k < h; ++k) {
      for (std::size_t a = 0; a < n; ++a) {
        hint[static_cast<std::size_t>(
            var_of(k, a, static_cast<std::size_t>(task_of[k][a])))] = 1.0;
      }
    }
    if (spec.include_fairness) {
      hint[m.vars.size() - 1] = fairness_max(); // the minimax column is last
    }
    plan.incumbent_hint = std::move(hint);
  }

  return plan;
}

std::string TapSequenceInstance::describe(const StepSolution& sol) const {
  const std::size_t n = size();
  std::ostringstream out;
  out << "total cost " << sol.raw_quality << ", max cost "
      << *std::max_element(sol.utilities.begin(), sol.utilities.end());
  (void)n;
  return out.str();
}

} // namespace tempofair
