#include "tempofair/milp/model.hpp"

#include <cmath>
#include <cstdio>

#include "tempofair/errors.hpp"

namespace tempofair::milp {

int LinearModel::add_variable(std::string name, double lower, double upper,
                              bool is_integer) {
  vars.push_back({std::move(name), lower, upper, is_integer});
  objective.push_back(0.0);
  return static_cast<int>(vars.size()) - 1;
}

int LinearModel::add_constraint(Constraint c) {
  cons.push_back(std::move(c));
  return static_cast<int>(cons.size()) - 1;
}

void LinearModel::set_objective_coef(int var, double coef) {
  objective.at(static_cast<std::size_t>(var)) = coef;
}

void LinearModel::validate() const {
  if (vars.empty()) throw ArgumentError("model: at least one variable required");
  if (objective.size() != vars.size()) {
    throw ArgumentError("model: objective size does not match variable count");
  }
  for (const Variable& v : vars) {
    if (v.is_integer && (!std::isfinite(v.lower) || !std::isfinite(v.upper))) {
      throw ArgumentError("model: integer variable '" + v.name +
                          "' must have finite bounds");
    }
    if (v.lower > v.upper) {
      throw ArgumentError("model: variable '" + v.name + "' has crossed bounds");
    }
  }
  for (const Constraint& c : cons) {
    for (const Term& t : c.terms) {
      if (t.var < 0 || t.var >= static_cast<int>(vars.size())) {
        throw ArgumentError("model: constraint '" + c.name +
                            "' references undeclared variable");
      }
    }
  }
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NodeLimit: return "node-limit";
  }
  return "unknown";
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_terms(const LinearModel& model, const std::vector<Term>& terms,
                 std::ostream& out) {
  bool first = true;
  for (const Term& t : terms) {
    if (t.coef == 0.0) continue;
    const double mag = std::abs(t.coef);
    if (first) {
      out << (t.coef < 0 ? "- " : "");
      first = false;
    } else {
      out << (t.coef < 0 ? " - " : " + ");
    }
    if (mag != 1.0) out << num(mag) << " ";
    out << model.vars[static_cast<std::size_t>(t.var)].name;
  }
  if (first) out << "0";
}

} // namespace

void write_lp_format(const LinearModel& model, std::ostream& out) {
  out << (model.maximize ? "Maximize\n" : "Minimize\n") << " obj: ";
  std::vector<Term> obj;
  for (std::size_t j = 0; j < model.objective.size(); ++j) {
    if (model.objective[j] != 0.0) {
      obj.push_back({static_cast<int>(j), model.objective[j]});
    }
  }
  write_terms(model, obj, out);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < model.cons.size(); ++i) {
    const Constraint& c = model.cons[i];
    out << " " << (c.name.empty() ? "c" + std::to_string(i) : c.name) << ": ";
    write_terms(model, c.terms, out);
    switch (c.sense) {
      case Sense::LessEqual: out << " <= "; break;
      case Sense::Equal: out << " = "; break;
      case Sense::GreaterEqual: out << " >= "; break;
    }
    out << num(c.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const Variable& v : model.vars) {
    out << " ";
    if (std::isfinite(v.lower)) out << num(v.lower) << " <= ";
    else out << "-inf <= ";
    out << v.name;
    if (std::isfinite(v.upper)) out << " <= " << num(v.upper);
    out << "\n";
  }
  bool any_int = false;
  for (const Variable& v : model.vars) {
    if (v.is_integer) {
      if (!any_int) {
        out << "General\n";
        any_int = true;
      }
      out << " " << v.name << "\n";
    }
  }
  out << "End\n";
}

} // namespace tempofair::milp
