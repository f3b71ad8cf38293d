/**
 * @file model.hpp
 * @brief Linear/integer model description and solve results.
 *
 * Models are stored column-major for variables (name, bounds, integrality)
 * and row-major for constraints (sparse coefficient lists). The objective is
 * a dense coefficient vector plus a sense flag. This is the only currency
 * between the domain compilers and the solver.
 */

#ifndef TEMPOFAIR_MILP_MODEL_HPP
#define TEMPOFAIR_MILP_MODEL_HPP

#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace tempofair::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Feasibility and integrality tolerance used throughout the solver.
inline constexpr double kTolerance = 1e-6;

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  bool is_integer = false;
};

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

struct LinearModel {
  std::vector<Variable> vars;
  std::vector<Constraint> cons;
  std::vector<double> objective; // dense, one coefficient per variable
  bool maximize = true;

  int add_variable(std::string name, double lower, double upper, bool is_integer);
  int add_constraint(Constraint c);
  void set_objective_coef(int var, double coef);

  /// Throws ArgumentError on malformed models (no variables, unbounded
  /// integer variables, references to undeclared variables).
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit };

const char* status_name(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> assignment;
  double objective_value = 0.0;
  long node_count = 0; // branch-and-bound nodes solved
  long lp_count = 0;   // LP relaxations solved (>= node_count with lazy cuts)

  /// Filled for Optimal LP solves: per-variable reduced costs in maximize
  /// orientation and bound statuses (0 basic or free, 1 at lower bound,
  /// 2 at upper bound). Consumed by reduced-cost fixing in branch-and-bound.
  std::vector<double> reduced_costs;
  std::vector<signed char> bound_status;
};

/// Lazy-constraint callback. Receives an integral LP solution and returns
/// the violated members of its constraint family (empty when none). Each
/// returned constraint must carry a unique name; a constraint is added to
/// the model at most once.
using Separator = std::function<std::vector<Constraint>(const std::vector<double>&)>;

/// Writes the model in LP text format (one constraint per line) for
/// cross-checking against external solvers.
void write_lp_format(const LinearModel& model, std::ostream& out);

} // namespace tempofair::milp

#endif // TEMPOFAIR_MILP_MODEL_HPP
