#include "tempofair/milp/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tempofair/errors.hpp"

namespace tempofair::milp {

namespace {

bool is_integral(double v) { return std::abs(v - std::round(v)) < 1e-9; }

// Largest value the offset-shifted utilities can reach under the variable
// bounds; infinity when any participating variable is unbounded the wrong
// way.
double utilities_upper_bound(const LinearModel& model,
                             std::span<const LinearExpr> utilities,
                             std::span<const double> offsets) {
  double bound = -kInfinity;
  for (std::size_t e = 0; e < utilities.size(); ++e) {
    double ub = offsets[e];
    for (const Term& t : utilities[e].terms) {
      const Variable& v = model.vars[static_cast<std::size_t>(t.var)];
      const double hi = t.coef >= 0.0 ? t.coef * v.upper : t.coef * v.lower;
      ub += hi;
      if (!std::isfinite(ub)) return kInfinity;
    }
    bound = std::max(bound, ub);
  }
  return bound;
}

// When every cost coefficient, variable in the expressions is integer-valued
// and every offset is integral, the extremal utilities are integral at any
// integer point, so the max/min variables may be declared integral without
// changing the optimum.
bool utilities_are_integral(const LinearModel& model,
                            std::span<const LinearExpr> utilities,
                            std::span<const double> offsets) {
  for (double off : offsets) {
    if (!is_integral(off)) return false;
  }
  for (const LinearExpr& expr : utilities) {
    for (const Term& t : expr.terms) {
      if (!is_integral(t.coef)) return false;
      if (!model.vars[static_cast<std::size_t>(t.var)].is_integer) return false;
    }
  }
  return true;
}

} // namespace

int linearize_minimax(LinearModel& model, std::span<const LinearExpr> utilities,
                      std::span<const double> offsets) {
  if (utilities.size() != offsets.size()) {
    throw ArgumentError("linearize_minimax: one offset per utility expression");
  }
  if (utilities.empty()) {
    throw ArgumentError("linearize_minimax: at least one entity required");
  }
  const double ub = utilities_upper_bound(model, utilities, offsets);
  const bool integral = std::isfinite(ub) &&
                        utilities_are_integral(model, utilities, offsets);
  const int max_var = model.add_variable("fair_max", 0.0, ub, integral);
  for (std::size_t e = 0; e < utilities.size(); ++e) {
    // max_var - U_e >= offset_e, i.e. max_var >= offset_e + U_e.
    Constraint c;
    c.name = "fair_max_" + std::to_string(e);
    c.sense = Sense::GreaterEqual;
    c.rhs = offsets[e];
    c.terms.push_back({max_var, 1.0});
    for (const Term& t : utilities[e].terms) c.terms.push_back({t.var, -t.coef});
    model.add_constraint(std::move(c));
  }
  return max_var;
}

GapVars linearize_gap(LinearModel& model, std::span<const LinearExpr> utilities,
                      std::span<const double> offsets) {
  GapVars out;
  out.max_var = linearize_minimax(model, utilities, offsets);
  const double ub = utilities_upper_bound(model, utilities, offsets);
  const bool integral = std::isfinite(ub) &&
                        utilities_are_integral(model, utilities, offsets);
  out.min_var = model.add_variable("fair_min", 0.0, ub, integral);
  for (std::size_t e = 0; e < utilities.size(); ++e) {
    // min_var - U_e <= offset_e, i.e. min_var <= offset_e + U_e.
    Constraint c;
    c.name = "fair_min_" + std::to_string(e);
    c.sense = Sense::LessEqual;
    c.rhs = offsets[e];
    c.terms.push_back({out.min_var, 1.0});
    for (const Term& t : utilities[e].terms) c.terms.push_back({t.var, -t.coef});
    model.add_constraint(std::move(c));
  }
  return out;
}

} // namespace tempofair::milp
