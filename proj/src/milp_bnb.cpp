#include "tempofair/milp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "tempofair/errors.hpp"

namespace tempofair::milp {

// Implemented in milp_simplex.cpp: LP solve with per-call bound overrides and
// an optional crash point, so branching never mutates the shared model.
SolveResult simplex_solve_bounded(const LinearModel& model,
                                  const std::vector<double>& lower,
                                  const std::vector<double>& upper,
                                  const double* crash_point);

namespace {

struct BranchDecision {
  int parent = -1;
  int var = -1;
  double lower = 0.0;
  double upper = 0.0;
  // Bookkeeping for pseudocost updates when the child is solved.
  bool went_up = false;
  double parent_frac = 0.0;
  double parent_obj = 0.0;
};

struct Node {
  double bound = 0.0; // parent LP objective, in maximize orientation
  long id = 0;
  int decision = -1; // index into the decision arena
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound; // best bound first
    return a.id > b.id;                               // then FIFO
  }
};

// Per-direction average objective degradation per unit of fractionality.
struct Pseudocost {
  double down_sum = 0.0;
  long down_n = 0;
  double up_sum = 0.0;
  long up_n = 0;
};

double fractionality(double v) {
  const double f = v - std::floor(v);
  return std::min(f, 1.0 - f);
}

bool satisfies(const Constraint& c, const std::vector<double>& x) {
  double lhs = 0.0;
  for (const Term& t : c.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
  switch (c.sense) {
    case Sense::LessEqual: return lhs <= c.rhs + kTolerance;
    case Sense::Equal: return std::abs(lhs - c.rhs) <= kTolerance;
    case Sense::GreaterEqual: return lhs >= c.rhs - kTolerance;
  }
  return false;
}

double objective_at(const LinearModel& model, const std::vector<double>& x) {
  double z = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) z += model.objective[j] * x[j];
  return z;
}

// Spacing of attainable objective values: the gcd of the (integral) objective
// coefficients when only integer variables carry cost, 0 otherwise. A
// positive granularity widens the pruning margin, since no feasible value
// can land strictly between incumbent and incumbent + g.
double objective_granularity(const LinearModel& model) {
  long long g = 0;
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    const double c = model.objective[j];
    if (c == 0.0) continue;
    if (!model.vars[j].is_integer) return 0.0;
    if (std::abs(c - std::round(c)) > 1e-9) return 0.0;
    const long long ci = std::llabs(std::llround(c));
    g = g == 0 ? ci : std::gcd(g, ci);
  }
  return static_cast<double>(g);
}

} // namespace

SolveResult branch_and_bound(const LinearModel& model, const Separator& separator,
                             const BranchAndBoundOptions& options) {
  model.validate();
  LinearModel working = model; // accumulates lazy cuts
  const std::size_t n = model.vars.size();
  const double sense = model.maximize ? 1.0 : -1.0;

  std::vector<double> root_lower(n), root_upper(n);
  for (std::size_t j = 0; j < n; ++j) {
    root_lower[j] = model.vars[j].lower;
    root_upper[j] = model.vars[j].upper;
  }

  // Lazy-cut pool management: the model keeps at most kMaxCutRows cut rows;
  // when full, the oldest unpinned cut is dropped (and may be found again —
  // a cut rediscovered twice is pinned for good, so separation still
  // terminates). Dropping a cut never invalidates bounds, it only loosens
  // later relaxations.
  const std::size_t base_rows = model.cons.size();
  constexpr std::size_t kMaxCutRows = 100;
  std::unordered_map<std::string, int> cut_seen;
  std::vector<std::string> cut_order; // active cuts, oldest first
  std::unordered_set<std::string> active_cuts;
  const bool trace = std::getenv("TEMPOFAIR_BNB_LOG") != nullptr;

  long node_count = 0;
  long lp_count = 0;
  bool have_incumbent = false;
  double incumbent_value = 0.0; // maximize orientation
  std::vector<double> incumbent;
  const double* crash = nullptr;

  const auto try_incumbent = [&](const std::vector<double>& x, double value) {
    if (!have_incumbent || value > incumbent_value + 1e-9) {
      have_incumbent = true;
      incumbent_value = value;
      incumbent = x;
      for (std::size_t j = 0; j < n; ++j) {
        if (model.vars[j].is_integer) incumbent[j] = std::round(incumbent[j]);
      }
    }
  };

  if (options.initial_incumbent) {
    const std::vector<double>& x = *options.initial_incumbent;
    bool ok = x.size() == n;
    for (std::size_t j = 0; ok && j < n; ++j) {
      const Variable& v = model.vars[j];
      if (x[j] < v.lower - kTolerance || x[j] > v.upper + kTolerance) ok = false;
      if (v.is_integer && fractionality(x[j]) > kTolerance) ok = false;
    }
    for (std::size_t i = 0; ok && i < working.cons.size(); ++i) {
      if (!satisfies(working.cons[i], x)) ok = false;
    }
    if (ok && separator) ok = separator(x).empty();
    if (ok) {
      try_incumbent(x, sense * objective_at(model, x));
      crash = options.initial_incumbent->data();
    }
  }

  std::vector<Pseudocost> pseudo(n);
  long sb_budget = options.strong_branch_budget;
  const auto pc_update = [&](int var, bool up, double frac, double degradation) {
    Pseudocost& p = pseudo[static_cast<std::size_t>(var)];
    const double denom = up ? 1.0 - frac : frac;
    if (denom < kTolerance) return;
    const double per_unit = std::max(degradation, 0.0) / denom;
    if (up) {
      p.up_sum += per_unit;
      ++p.up_n;
    } else {
      p.down_sum += per_unit;
      ++p.down_n;
    }
  };

  std::vector<BranchDecision> arena;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push({std::numeric_limits<double>::infinity(), next_id++, -1});

  const double prune_eps = 1e-9;
  const double granularity = objective_granularity(model);
  std::vector<double> lower(n), upper(n);

  const auto pruned_by_bound = [&](double bound) {
    if (!have_incumbent) return false;
    const double slack = std::max(
        granularity - 1e-6, prune_eps * std::max(1.0, std::abs(incumbent_value)));
    return bound <= incumbent_value + slack;
  };

  while (!open.empty()) {
    const Node node = open.top();
    open.pop();
    if (pruned_by_bound(node.bound)) continue;
    if (node_count >= options.node_limit) {
      SolveResult out;
      out.status = SolveStatus::NodeLimit;
      out.node_count = node_count;
      out.lp_count = lp_count;
      if (have_incumbent) {
        out.assignment = incumbent;
        out.objective_value = objective_at(model, incumbent);
      }
      return out;
    }
    ++node_count;
    if (trace && node_count % 200 == 0) {
      std::fprintf(stderr, "[bnb] nodes=%ld open=%zu bound=%.4f incumbent=%.4f cuts=%zu\n",
                   node_count, open.size(), node.bound,
                   have_incumbent ? incumbent_value : std::nan(""), active_cuts.size());
    }

    lower = root_lower;
    upper = root_upper;
    for (int d = node.decision; d >= 0; d = arena[static_cast<std::size_t>(d)].parent) {
      const BranchDecision& bd = arena[static_cast<std::size_t>(d)];
      lower[static_cast<std::size_t>(bd.var)] =
          std::max(lower[static_cast<std::size_t>(bd.var)], bd.lower);
      upper[static_cast<std::size_t>(bd.var)] =
          std::min(upper[static_cast<std::size_t>(bd.var)], bd.upper);
    }

    // Bound tightenings found at this node (reduced-cost fixing, one-sided
    // strong branching) are appended to the decision chain so the children
    // inherit them.
    int decision_chain = node.decision;
    const auto record_bound = [&](int var, double lo, double hi) {
      const std::size_t vs = static_cast<std::size_t>(var);
      lower[vs] = std::max(lower[vs], lo);
      upper[vs] = std::min(upper[vs], hi);
      arena.push_back({decision_chain, var, lower[vs], upper[vs], false, 0.0, 0.0});
      decision_chain = static_cast<int>(arena.size()) - 1;
    };

    // Re-solve loop: integral LP solutions go through lazy separation, and
    // strong-branching infeasibilities tighten this node's bounds in place.
    bool fed_pseudocost = false;
    int fractional_sep_rounds = 0;
    for (;;) {
      SolveResult lp = simplex_solve_bounded(working, lower, upper, crash);
      ++lp_count;
      if (lp.status == SolveStatus::Infeasible) break;
      if (lp.status == SolveStatus::Unbounded) {
        if (node.decision == -1 && !have_incumbent) {
          SolveResult out;
          out.status = SolveStatus::Unbounded;
          out.node_count = node_count;
          out.lp_count = lp_count;
          return out;
        }
        throw NumericalError("branch_and_bound: unbounded node relaxation");
      }

      const double node_obj = sense * lp.objective_value;
      if (!fed_pseudocost && node.decision >= 0) {
        const BranchDecision& bd = arena[static_cast<std::size_t>(node.decision)];
        pc_update(bd.var, bd.went_up, bd.parent_frac,
                  std::max(bd.parent_obj - node_obj, 0.0));
        fed_pseudocost = true;
      }
      if (pruned_by_bound(node_obj)) break;

      // Reduced-cost fixing: a bound-parked integer variable whose first
      // unit step already drops the bound to the pruning level can be fixed
      // at its bound for the entire subtree.
      if (have_incumbent && !lp.reduced_costs.empty()) {
        for (std::size_t j = 0; j < n; ++j) {
          if (!model.vars[j].is_integer) continue;
          if (upper[j] - lower[j] < 0.5) continue;
          const signed char st = lp.bound_status[j];
          if (st == 0) continue;
          const double step = lp.reduced_costs[j]; // maximize orientation
          if (st == 1 && pruned_by_bound(node_obj - std::max(-step, 0.0))) {
            record_bound(static_cast<int>(j), lower[j], lower[j]);
          } else if (st == 2 && pruned_by_bound(node_obj - std::max(step, 0.0))) {
            record_bound(static_cast<int>(j), upper[j], upper[j]);
          }
        }
      }

      std::vector<int> fractional;
      int top_priority = std::numeric_limits<int>::min();
      for (std::size_t j = 0; j < n; ++j) {
        if (!model.vars[j].is_integer) continue;
        if (fractionality(lp.assignment[j]) > kTolerance) {
          fractional.push_back(static_cast<int>(j));
          if (!options.branch_priority.empty()) {
            top_priority = std::max(top_priority, options.branch_priority[j]);
          }
        }
      }
      if (!options.branch_priority.empty() && !fractional.empty()) {
        std::erase_if(fractional, [&](int j) {
          return options.branch_priority[static_cast<std::size_t>(j)] < top_priority;
        });
      }

      // Lazy separation. Integral candidates must always pass it before
      // becoming incumbents; fractional points may also yield violated
      // family members (found by min-cut rather than components), which
      // tightens the relaxation everywhere. Fractional rounds are capped per
      // node so cut generation cannot stall the search.
      if (separator && (fractional.empty() || fractional_sep_rounds < 2)) {
        if (!fractional.empty()) ++fractional_sep_rounds;
        std::vector<double> probe = lp.assignment;
        for (std::size_t j = 0; j < n; ++j) {
          if (model.vars[j].is_integer && fractionality(probe[j]) <= kTolerance) {
            probe[j] = std::round(probe[j]);
          }
        }
        std::vector<Constraint> cuts = separator(probe);
        bool added = false;
        for (Constraint& cut : cuts) {
          if (cut.name.empty()) {
            throw ArgumentError("branch_and_bound: lazy cuts must be named");
          }
          if (active_cuts.contains(cut.name)) continue;
          const int seen = ++cut_seen[cut.name];
          if (seen < 3 && active_cuts.size() >= kMaxCutRows) {
            // Make room: drop the oldest unpinned cut.
            for (std::size_t k = 0; k < cut_order.size(); ++k) {
              const std::string& victim = cut_order[k];
              if (!active_cuts.contains(victim) || cut_seen[victim] >= 3) continue;
              for (std::size_t r = base_rows; r < working.cons.size(); ++r) {
                if (working.cons[r].name == victim) {
                  working.cons.erase(working.cons.begin() +
                                     static_cast<std::ptrdiff_t>(r));
                  break;
                }
              }
              active_cuts.erase(victim);
              cut_order.erase(cut_order.begin() + static_cast<std::ptrdiff_t>(k));
              break;
            }
          }
          active_cuts.insert(cut.name);
          cut_order.push_back(cut.name);
          working.add_constraint(std::move(cut));
          added = true;
        }
        if (added) continue; // re-solve this node with the new cuts
      }

      if (fractional.empty()) {
        try_incumbent(lp.assignment, node_obj);
        break;
      }

      // Reliability selection: pseudocost estimates, with strong branching
      // to initialize unseen variables while the budget lasts. Candidates
      // are ordered by fractionality (ties: lowest index).
      std::stable_sort(fractional.begin(), fractional.end(), [&](int a, int b) {
        return fractionality(lp.assignment[static_cast<std::size_t>(a)]) >
               fractionality(lp.assignment[static_cast<std::size_t>(b)]);
      });

      double avg_down = 0.0, avg_up = 0.0;
      long n_down = 0, n_up = 0;
      for (const Pseudocost& p : pseudo) {
        if (p.down_n > 0) {
          avg_down += p.down_sum / static_cast<double>(p.down_n);
          ++n_down;
        }
        if (p.up_n > 0) {
          avg_up += p.up_sum / static_cast<double>(p.up_n);
          ++n_up;
        }
      }
      avg_down = n_down > 0 ? avg_down / static_cast<double>(n_down) : 1.0;
      avg_up = n_up > 0 ? avg_up / static_cast<double>(n_up) : 1.0;

      int branch_var = -1;
      double branch_score = -1.0;
      bool tightened = false;
      int sb_tried = 0;
      for (int j : fractional) {
        const std::size_t js = static_cast<std::size_t>(j);
        const double v = lp.assignment[js];
        const double f = v - std::floor(v);
        Pseudocost& p = pseudo[js];

        if ((p.down_n == 0 || p.up_n == 0) && sb_budget > 1 && sb_tried < 8) {
          ++sb_tried;
          sb_budget -= 2;
          const double keep_u = upper[js], keep_l = lower[js];

          upper[js] = std::floor(v);
          const SolveResult down = simplex_solve_bounded(working, lower, upper, crash);
          upper[js] = keep_u;
          ++lp_count;

          lower[js] = std::floor(v) + 1.0;
          const SolveResult up = simplex_solve_bounded(working, lower, upper, crash);
          lower[js] = keep_l;
          ++lp_count;

          const bool down_dead = down.status != SolveStatus::Optimal ||
                                 pruned_by_bound(sense * down.objective_value);
          const bool up_dead = up.status != SolveStatus::Optimal ||
                               pruned_by_bound(sense * up.objective_value);
          if (down.status == SolveStatus::Optimal) {
            pc_update(j, false, f, node_obj - sense * down.objective_value);
          }
          if (up.status == SolveStatus::Optimal) {
            pc_update(j, true, f, node_obj - sense * up.objective_value);
          }
          if (down_dead && up_dead) {
            tightened = true; // both directions dead: node is done
            branch_var = -2;
            break;
          }
          if (down_dead) {
            record_bound(j, std::floor(v) + 1.0, upper[js]); // only up survives
            tightened = true;
            break;
          }
          if (up_dead) {
            record_bound(j, lower[js], std::floor(v)); // only down survives
            tightened = true;
            break;
          }
        }

        const double est_down =
            (p.down_n > 0 ? p.down_sum / static_cast<double>(p.down_n) : avg_down) * f;
        const double est_up =
            (p.up_n > 0 ? p.up_sum / static_cast<double>(p.up_n) : avg_up) *
            (1.0 - f);
        const double score =
            std::max(est_down, 1e-6) * std::max(est_up, 1e-6);
        if (score > branch_score + 1e-12) {
          branch_score = score;
          branch_var = j;
        }
      }

      if (branch_var == -2) break;   // strong branching closed the node
      if (tightened) continue;       // bounds changed: re-solve this node

      const std::size_t bs = static_cast<std::size_t>(branch_var);
      const double v = lp.assignment[bs];
      const double down = std::floor(v);
      const double f = v - down;
      const int parent = decision_chain;
      arena.push_back({parent, branch_var, lower[bs], down, false, f, node_obj});
      open.push({node_obj, next_id++, static_cast<int>(arena.size()) - 1});
      arena.push_back({parent, branch_var, down + 1.0, upper[bs], true, f, node_obj});
      open.push({node_obj, next_id++, static_cast<int>(arena.size()) - 1});
      break;
    }
  }

  SolveResult out;
  out.node_count = node_count;
  out.lp_count = lp_count;
  if (have_incumbent) {
    out.status = SolveStatus::Optimal;
    out.assignment = incumbent;
    out.objective_value = objective_at(model, incumbent);
  } else {
    out.status = SolveStatus::Infeasible;
  }
  return out;
}

} // namespace tempofair::milp
