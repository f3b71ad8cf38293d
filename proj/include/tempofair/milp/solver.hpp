/**
 * @file solver.hpp
 * @brief LP relaxation solver and branch-and-bound driver.
 */

#ifndef TEMPOFAIR_MILP_SOLVER_HPP
#define TEMPOFAIR_MILP_SOLVER_HPP

#include <optional>

#include "tempofair/milp/model.hpp"

namespace tempofair::milp {

/// Solves the LP relaxation (integrality ignored) with a two-phase primal
/// simplex over bounded variables. Dantzig pricing with a permanent switch
/// to Bland's rule when the objective stalls, which guarantees termination
/// under degeneracy. A numerically singular basis triggers one perturbed
/// restart before failing with NumericalError.
SolveResult simplex_solve(const LinearModel& model);

struct BranchAndBoundOptions {
  long node_limit = 50'000'000;
  /// Optional warm incumbent (a feasible integral assignment). Used to prune
  /// and as the LP crash point; the search itself is unchanged.
  std::optional<std::vector<double>> initial_incumbent;
  /// Per-variable branching priority (higher branches first); empty means
  /// uniform. Fractional variables of the highest priority class present are
  /// considered before any others.
  std::vector<int> branch_priority;
  /// LP-solve budget for strong-branching initialization of pseudocosts.
  long strong_branch_budget = 160;
};

/// Exact branch-and-bound on the model's integer variables. Best-bound node
/// selection; branches on the most fractional variable (ties: lowest index).
/// `separator`, when given, is called on every integral LP solution; any
/// returned constraints are added to the model (each at most once, keyed by
/// name) and the node is re-solved. Returns NodeLimit status with the
/// incumbent when the node budget is exhausted.
SolveResult branch_and_bound(const LinearModel& model,
                             const Separator& separator = nullptr,
                             const BranchAndBoundOptions& options = {});

} // namespace tempofair::milp

#endif // TEMPOFAIR_MILP_SOLVER_HPP
