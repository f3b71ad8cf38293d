#include "tempofair/domains/vrp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tempofair/errors.hpp"
#include "tempofair/milp/linearize.hpp"

namespace tempofair {

namespace {
const std::string kDomainName = "vrp";
} // namespace

VrpInstance::VrpInstance(int grid_size, std::pair<int, int> depot,
                         std::vector<std::pair<int, int>> other_points,
                         int n_vehicles)
    : grid_size_(grid_size) {
  if (n_vehicles < 1) throw ArgumentError("vrp: needs at least one vehicle");
  points_.push_back(depot);
  for (const auto& p : other_points) {
    if (p == depot) throw ArgumentError("vrp: the depot cannot be a customer point");
    points_.push_back(p);
  }
  std::sort(points_.begin() + 1, points_.end());
  if (std::adjacent_find(points_.begin() + 1, points_.end()) != points_.end()) {
    throw ArgumentError("vrp: duplicate points");
  }
  if (points_.size() < static_cast<std::size_t>(n_vehicles) + 1) {
    throw InfeasibleError(
        "vrp: fewer customer points than vehicles; depot departures cannot all "
        "be satisfied");
  }
  for (int v = 0; v < n_vehicles; ++v) vehicles_.push_back("V" + std::to_string(v + 1));

  const std::size_t n = points_.size();
  dist_.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double dx = points_[a].first - points_[b].first;
      const double dy = points_[a].second - points_[b].second;
      dist_[a * n + b] = std::sqrt(dx * dx + dy * dy);
    }
  }
}

const std::string& VrpInstance::domain_name() const { return kDomainName; }

std::size_t VrpInstance::arc_index(std::size_t vehicle, std::size_t a,
                                   std::size_t b) const {
  const std::size_t n = points_.size();
  return vehicle * n * (n - 1) + a * (n - 1) + (b > a ? b - 1 : b);
}

void VrpInstance::arc_of(std::size_t index, std::size_t& vehicle, std::size_t& a,
                         std::size_t& b) const {
  const std::size_t n = points_.size();
  vehicle = index / (n * (n - 1));
  const std::size_t rest = index % (n * (n - 1));
  a = rest / (n - 1);
  b = rest % (n - 1);
  if (b >= a) ++b;
}

std::vector<std::vector<std::size_t>> VrpInstance::routes_of(
    const std::vector<double>& vars) const {
  const std::size_t n = points_.size();
  const std::size_t nv = vehicles_.size();
  if (vars.size() != n_arcs()) throw ArgumentError("vrp: arc vector has wrong size");

  std::vector<std::vector<std::size_t>> routes(nv);
  std::vector<int> visits(n, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    std::vector<int> succ(n, -1);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        if (vars[arc_index(v, a, b)] > 0.5) {
          if (succ[a] != -1) {
            throw ConstraintViolation("vrp: vehicle " + vehicles_[v] +
                                      " leaves point " + std::to_string(a) +
                                      " twice");
          }
          succ[a] = static_cast<int>(b);
        }
      }
    }
    std::size_t cur = 0;
    if (succ[0] == -1) {
      throw ConstraintViolation("vrp: vehicle " + vehicles_[v] +
                                " never departs the depot");
    }
    for (std::size_t hops = 0; hops <= n; ++hops) {
      const int nxt = succ[cur];
      if (nxt < 0) {
        throw ConstraintViolation("vrp: vehicle " + vehicles_[v] +
                                  " route breaks at point " + std::to_string(cur));
      }
      cur = static_cast<std::size_t>(nxt);
      if (cur == 0) break;
      routes[v].push_back(cur);
      ++visits[cur];
    }
    if (cur != 0) {
      throw ConstraintViolation("vrp: vehicle " + vehicles_[v] +
                                " does not return to the depot");
    }
  }
  for (std::size_t p = 1; p < n; ++p) {
    if (visits[p] != 1) {
      throw ConstraintViolation("vrp: point " + std::to_string(p) + " visited " +
                                std::to_string(visits[p]) + " times");
    }
  }
  // Arcs outside the traced routes would be disconnected subtours.
  std::size_t used_arcs = 0;
  for (double v : vars) used_arcs += v > 0.5 ? 1 : 0;
  std::size_t route_arcs = 0;
  for (const auto& r : routes) route_arcs += r.size() + 1;
  if (used_arcs != route_arcs) {
    throw ConstraintViolation("vrp: support contains a cycle disconnected from "
                              "the depot");
  }
  return routes;
}

StepSolution VrpInstance::evaluate(int /*step*/, const std::vector<double>& vars) const {
  const std::vector<std::vector<std::size_t>> routes = routes_of(vars);
  StepSolution sol;
  sol.vars = vars;
  sol.utilities.assign(vehicles_.size(), 0.0);
  for (std::size_t v = 0; v < routes.size(); ++v) {
    double len = 0.0;
    std::size_t prev = 0;
    for (std::size_t p : routes[v]) {
      len += distance(prev, p);
      prev = p;
    }
    len += distance(prev, 0);
    sol.utilities[v] = len;
    sol.raw_quality += len;
  }
  sol.quality = -sol.raw_quality;
  return sol;
}

MilpPlan VrpInstance::build_milp(const MilpBuildSpec& spec) const {
  if (spec.horizon != 1) {
    throw ArgumentError("vrp: only single-step planning windows are supported");
  }
  if (!spec.offsets.empty() && spec.offsets.size() != vehicles_.size()) {
    throw ArgumentError("vrp: one offset per vehicle required");
  }
  const std::size_t n = points_.size();
  const std::size_t nv = vehicles_.size();

  MilpPlan plan;
  milp::LinearModel& m = plan.model;
  m.maximize = true;

  for (std::size_t idx = 0; idx < n_arcs(); ++idx) {
    std::size_t v, a, b;
    arc_of(idx, v, a, b);
    const int var = m.add_variable("x_" + std::to_string(v) + "_" + std::to_string(a) +
                                       "_" + std::to_string(b),
                                   0.0, 1.0, true);
    m.set_objective_coef(var, -distance(a, b));
  }

  // Flow conservation at every point for every vehicle.
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t b = 0; b < n; ++b) {
      milp::Constraint c;
      c.name = "flow_v" + std::to_string(v) + "_p" + std::to_string(b);
      c.sense = milp::Sense::Equal;
      c.rhs = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        if (a == b) continue;
        c.terms.push_back({static_cast<int>(arc_index(v, a, b)), 1.0});
        c.terms.push_back({static_cast<int>(arc_index(v, b, a)), -1.0});
      }
      m.add_constraint(std::move(c));
    }
  }
  // Every customer point receives exactly one incoming arc overall.
  for (std::size_t b = 1; b < n; ++b) {
    milp::Constraint c;
    c.name = "visit_p" + std::to_string(b);
    c.sense = milp::Sense::Equal;
    c.rhs = 1.0;
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t a = 0; a < n; ++a) {
        if (a == b) continue;
        c.terms.push_back({static_cast<int>(arc_index(v, a, b)), 1.0});
      }
    }
    m.add_constraint(std::move(c));
  }
  // Every vehicle departs the depot exactly once.
  for (std::size_t v = 0; v < nv; ++v) {
    milp::Constraint c;
    c.name = "depart_v" + std::to_string(v);
    c.sense = milp::Sense::Equal;
    c.rhs = 1.0;
    for (std::size_t b = 1; b < n; ++b) {
      c.terms.push_back({static_cast<int>(arc_index(v, 0, b)), 1.0});
    }
    m.add_constraint(std::move(c));
  }

  const std::vector<double> offsets =
      spec.offsets.empty() ? std::vector<double>(nv, 0.0) : spec.offsets;
  const bool symmetric_vehicles =
      std::adjacent_find(offsets.begin(), offsets.end(),
                         [](double a, double b) { return a != b; }) == offsets.end();

  if (spec.include_fairness) {
    if (spec.metric != Metric::MaxMinGap) {
      throw ArgumentError("vrp: MILP fairness supports the max-min-gap metric");
    }
    std::vector<milp::LinearExpr> exprs(nv);
    for (std::size_t idx = 0; idx < n_arcs(); ++idx) {
      std::size_t v, a, b;
      arc_of(idx, v, a, b);
      const double d = distance(a, b);
      if (d != 0.0) exprs[v].terms.push_back({static_cast<int>(idx), d});
    }
    const milp::GapVars gv = milp::linearize_gap(m, exprs, offsets);
    m.set_objective_coef(gv.max_var, -spec.beta);
    m.set_objective_coef(gv.min_var, spec.beta);
  }

  if (symmetric_vehicles && nv > 1) {
    // Interchangeable vehicles: demand nondecreasing route lengths. Every
    // solution has exactly one vehicle relabeling that satisfies this, so
    // the optimal value is untouched while the search sheds the nv!
    // symmetric copies of each subtree.
    for (std::size_t v = 0; v + 1 < nv; ++v) {
      milp::Constraint c;
      c.name = "order_v" + std::to_string(v);
      c.sense = milp::Sense::GreaterEqual;
      c.rhs = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          if (a == b) continue;
          const double d = distance(a, b);
          if (d == 0.0) continue;
          c.terms.push_back({static_cast<int>(arc_index(v + 1, a, b)), d});
          c.terms.push_back({static_cast<int>(arc_index(v, a, b)), -d});
        }
      }
      m.add_constraint(std::move(c));
    }
  }

  // Lazy subtour cuts. Integral support graphs are separated by connected
  // components; fractional points by a depot/point min cut on the aggregated
  // arc weights, which catches subtours while the relaxation is still
  // fractional. Both produce members of the same crossing family.
  const std::size_t n_arc_vars = n_arcs();
  plan.separator = [this, n, nv, n_arc_vars](const std::vector<double>& x) {
    std::vector<milp::Constraint> cuts;
    std::vector<char> covered(n, 0);

    const auto emit = [&](const std::vector<std::size_t>& members) {
      if (members.empty() || members.size() > n - 2) return;
      milp::Constraint cut;
      cut.sense = milp::Sense::GreaterEqual;
      cut.rhs = 1.0;
      std::ostringstream name;
      name << "subtour";
      for (std::size_t p : members) name << "_" << p;
      cut.name = name.str();
      std::vector<char> inside(n, 0);
      for (std::size_t p : members) {
        inside[p] = 1;
        covered[p] = 1;
      }
      for (std::size_t v = 0; v < nv; ++v) {
        for (std::size_t a : members) {
          for (std::size_t b = 0; b < n; ++b) {
            if (inside[b] || a == b) continue;
            cut.terms.push_back({static_cast<int>(arc_index(v, a, b)), 1.0});
          }
        }
      }
      cuts.push_back(std::move(cut));
    };

    // Aggregated directed arc weights over all vehicles.
    std::vector<double> weight(n * n, 0.0);
    bool integral = true;
    for (std::size_t idx = 0; idx < n_arc_vars; ++idx) {
      const double xv = x[idx];
      if (xv <= 1e-9) continue;
      if (xv < 1.0 - 1e-6) integral = false;
      std::size_t v, a, b;
      arc_of(idx, v, a, b);
      weight[a * n + b] += xv;
    }

    if (integral) {
      // Connected components of the support graph that miss the depot.
      std::vector<int> comp(n, -1);
      int n_comp = 0;
      for (std::size_t start = 0; start < n; ++start) {
        if (comp[start] >= 0) continue;
        const int id = n_comp++;
        std::vector<std::size_t> stack{start};
        comp[start] = id;
        while (!stack.empty()) {
          const std::size_t cur = stack.back();
          stack.pop_back();
          for (std::size_t nxt = 0; nxt < n; ++nxt) {
            if (comp[nxt] >= 0) continue;
            if (weight[cur * n + nxt] > 0.5 || weight[nxt * n + cur] > 0.5) {
              comp[nxt] = id;
              stack.push_back(nxt);
            }
          }
        }
      }
      for (int id = 0; id < n_comp; ++id) {
        if (comp[0] == id) continue;
        std::vector<std::size_t> members;
        for (std::size_t p = 1; p < n; ++p) {
          if (comp[p] == id) members.push_back(p);
        }
        emit(members);
      }
      return cuts;
    }

    // Fractional point: for every customer, check whether less than one unit
    // of arc weight leaves its side of a min cut to the depot (max-flow on
    // the aggregated weights, point as source and depot as sink).
    std::vector<double> cap(n * n);
    for (std::size_t p = 1; p < n; ++p) {
      if (covered[p]) continue;
      cap = weight;
      double flow = 0.0;
      for (;;) { // augment along BFS paths
        std::vector<int> parent(n, -1);
        parent[p] = static_cast<int>(p);
        std::vector<std::size_t> queue{p};
        for (std::size_t qi = 0; qi < queue.size() && parent[0] < 0; ++qi) {
          const std::size_t cur = queue[qi];
          for (std::size_t nxt = 0; nxt < n; ++nxt) {
            if (parent[nxt] >= 0 || cap[cur * n + nxt] <= 1e-9) continue;
            parent[nxt] = static_cast<int>(cur);
            queue.push_back(nxt);
          }
        }
        if (parent[0] < 0) break;
        double aug = std::numeric_limits<double>::infinity();
        for (std::size_t cur = 0; cur != p;) {
          const std::size_t prev = static_cast<std::size_t>(parent[cur]);
          aug = std::min(aug, cap[prev * n + cur]);
          cur = prev;
        }
        for (std::size_t cur = 0; cur != p;) {
          const std::size_t prev = static_cast<std::size_t>(parent[cur]);
          cap[prev * n + cur] -= aug;
          cap[cur * n + prev] += aug;
          cur = prev;
        }
        flow += aug;
        if (flow >= 1.0 - 1e-6) break;
      }
      if (flow >= 1.0 - 1e-6) continue;
      // Residual-reachable side of the source is the violated set.
      std::vector<char> side(n, 0);
      side[p] = 1;
      std::vector<std::size_t> stack{p};
      while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        for (std::size_t nxt = 0; nxt < n; ++nxt) {
          if (side[nxt] || cap[cur * n + nxt] <= 1e-9) continue;
          side[nxt] = 1;
          stack.push_back(nxt);
        }
      }
      if (side[0]) continue; // depot reachable: no cut after all
      std::vector<std::size_t> members;
      for (std::size_t q = 1; q < n; ++q) {
        if (side[q]) members.push_back(q);
      }
      if (members.size() >= 2) emit(members);
    }
    return cuts;
  };

  plan.strong_branch_budget = 60;
  // Depot departures define each route's identity; settling them first
  // makes branching decisions consequential under vehicle symmetry.
  plan.branch_priority.assign(m.vars.size(), 0);
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t b = 1; b < n; ++b) {
      plan.branch_priority[arc_index(v, 0, b)] = 1;
    }
  }

  plan.decode = [this, n_arc_vars](const std::vector<double>& x) {
    std::vector<double> vars(x.begin(),
                             x.begin() + static_cast<std::ptrdiff_t>(n_arc_vars));
    for (double& v : vars) v = v > 0.5 ? 1.0 : 0.0;
    return std::vector<StepSolution>{evaluate(0, vars)};
  };

  plan.incumbent_hint = [&]() -> std::optional<std::vector<double>> {
    // Two constructions: greedy nearest-neighbor growth and an angular sweep
    // split into equal slices. Routes are polished by 2-opt and inter-route
    // relocation against the actual objective; the better construction wins.
    const auto route_length = [&](const std::vector<std::size_t>& r) {
      double len = 0.0;
      std::size_t prev = 0;
      for (std::size_t p : r) {
        len += distance(prev, p);
        prev = p;
      }
      return len + distance(prev, 0);
    };
    const auto objective_of = [&](const std::vector<std::vector<std::size_t>>& routes) {
      double total = 0.0;
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < nv; ++v) {
        const double len = route_length(routes[v]);
        total += len;
        hi = std::max(hi, offsets[v] + len);
        lo = std::min(lo, offsets[v] + len);
      }
      return -total - (spec.include_fairness ? spec.beta * (hi - lo) : 0.0);
    };
    const auto two_opt = [&](std::vector<std::size_t>& r) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
          for (std::size_t j = i + 1; j < r.size(); ++j) {
            const std::size_t before = i == 0 ? 0 : r[i - 1];
            const std::size_t after = j + 1 == r.size() ? 0 : r[j + 1];
            const double cur = distance(before, r[i]) + distance(r[j], after);
            const double alt = distance(before, r[j]) + distance(r[i], after);
            if (alt < cur - 1e-12) {
              std::reverse(r.begin() + static_cast<std::ptrdiff_t>(i),
                           r.begin() + static_cast<std::ptrdiff_t>(j) + 1);
              improved = true;
            }
          }
        }
      }
    };

    std::vector<std::vector<std::vector<std::size_t>>> candidates;
    {
      // Nearest neighbor: seed each vehicle with its closest free point,
      // then repeatedly extend the cheapest (endpoint, point) pair.
      std::vector<char> taken(n, 0);
      taken[0] = 1;
      std::vector<std::vector<std::size_t>> routes(nv);
      std::vector<std::size_t> endpoint(nv, 0);
      for (std::size_t v = 0; v < nv; ++v) {
        std::size_t best_p = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t p = 1; p < n; ++p) {
          if (!taken[p] && distance(0, p) < best_d) {
            best_d = distance(0, p);
            best_p = p;
          }
        }
        taken[best_p] = 1;
        routes[v].push_back(best_p);
        endpoint[v] = best_p;
      }
      for (;;) {
        std::size_t best_v = nv, best_p = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < nv; ++v) {
          for (std::size_t p = 1; p < n; ++p) {
            if (taken[p]) continue;
            if (distance(endpoint[v], p) < best_d) {
              best_d = distance(endpoint[v], p);
              best_v = v;
              best_p = p;
            }
          }
        }
        if (best_v == nv) break;
        taken[best_p] = 1;
        routes[best_v].push_back(best_p);
        endpoint[best_v] = best_p;
      }
      candidates.push_back(std::move(routes));
    }
    {
      // Angular sweep into contiguous slices of near-equal size.
      std::vector<std::size_t> order(n - 1);
      std::iota(order.begin(), order.end(), 1);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double aa = std::atan2(points_[a].second - points_[0].second,
                                     points_[a].first - points_[0].first);
        const double ab = std::atan2(points_[b].second - points_[0].second,
                                     points_[b].first - points_[0].first);
        if (aa != ab) return aa < ab;
        return a < b;
      });
      std::vector<std::vector<std::size_t>> routes(nv);
      const std::size_t per = (order.size() + nv - 1) / nv;
      for (std::size_t i = 0; i < order.size(); ++i) {
        routes[std::min(i / per, nv - 1)].push_back(order[i]);
      }
      // Slices can come out empty when points bunch; steal from the largest.
      for (std::size_t v = 0; v < nv; ++v) {
        if (!routes[v].empty()) continue;
        std::size_t donor = 0;
        for (std::size_t w = 1; w < nv; ++w) {
          if (routes[w].size() > routes[donor].size()) donor = w;
        }
        routes[v].push_back(routes[donor].back());
        routes[donor].pop_back();
      }
      candidates.push_back(std::move(routes));
    }

    // Inter-route relocation: move one point to the best position of any
    // route while it improves the combined objective.
    const auto relocate = [&](std::vector<std::vector<std::size_t>>& routes) {
      double best = objective_of(routes);
      for (int pass = 0; pass < 20; ++pass) {
        bool improved = false;
        for (std::size_t from = 0; from < nv; ++from) {
          for (std::size_t i = 0; i < routes[from].size(); ++i) {
            if (routes[from].size() == 1) continue; // keep every route staffed
            const std::size_t point = routes[from][i];
            for (std::size_t to = 0; to < nv; ++to) {
              for (std::size_t pos = 0; pos <= routes[to].size(); ++pos) {
                if (to == from) continue;
                auto trial = routes;
                trial[from].erase(trial[from].begin() + static_cast<std::ptrdiff_t>(i));
                trial[to].insert(trial[to].begin() + static_cast<std::ptrdiff_t>(pos),
                                 point);
                const double cand = objective_of(trial);
                if (cand > best + 1e-9) {
                  best = cand;
                  routes = std::move(trial);
                  improved = true;
                  i = routes[from].size(); // restart this route
                  break;
                }
              }
              if (improved) break;
            }
            if (improved) break;
          }
        }
        if (!improved) break;
      }
    };

    std::optional<std::vector<double>> best_hint;
    double best_obj = -std::numeric_limits<double>::infinity();
    for (auto& routes : candidates) {
      bool ok = true;
      for (auto& r : routes) {
        if (r.empty()) ok = false;
      }
      if (!ok) continue;
      for (auto& r : routes) two_opt(r);
      relocate(routes);
      for (auto& r : routes) two_opt(r);
      if (symmetric_vehicles) {
        // Match the ordering constraints: shortest route on the first vehicle.
        std::stable_sort(routes.begin(), routes.end(),
                         [&](const auto& a, const auto& b) {
                           return route_length(a) < route_length(b);
                         });
      }
      std::vector<double> hint(m.vars.size(), 0.0);
      for (std::size_t v = 0; v < nv; ++v) {
        std::size_t prev = 0;
        for (std::size_t p : routes[v]) {
          hint[arc_index(v, prev, p)] = 1.0;
          prev = p;
        }
        hint[arc_index(v, prev, 0)] = 1.0;
      }
      if (spec.include_fairness) {
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < nv; ++v) {
          const double len = offsets[v] + route_length(routes[v]);
          hi = std::max(hi, len);
          lo = std::min(lo, len);
        }
        hint[m.vars.size() - 2] = hi; // fair_max
        hint[m.vars.size() - 1] = lo; // fair_min
      }
      double obj = 0.0;
      for (std::size_t j = 0; j < hint.size(); ++j) obj += m.objective[j] * hint[j];
      if (obj > best_obj) {
        best_obj = obj;
        best_hint = std::move(hint);
      }
    }
    return best_hint;
  }();

  return plan;
}

std::string VrpInstance::describe(const StepSolution& sol) const {
  const auto routes = routes_of(sol.vars);
  std::ostringstream out;
  for (std::size_t v = 0; v < routes.size(); ++v) {
    if (v) out << "; ";
    out << vehicles_[v] << ": depot";
    for (std::size_t p : routes[v]) {
      out << " -> (" << points_[p].first << "," << points_[p].second << ")";
    }
    out << " -> depot [" << sol.utilities[v] << "]";
  }
  return out.str();
}

} // namespace tempofair
