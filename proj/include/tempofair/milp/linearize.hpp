/**
 * @file linearize.hpp
 * @brief Standard linearizations of max / max-min fairness terms.
 */

#ifndef TEMPOFAIR_MILP_LINEARIZE_HPP
#define TEMPOFAIR_MILP_LINEARIZE_HPP

#include <span>

#include "tempofair/milp/model.hpp"

namespace tempofair::milp {

/// A linear expression over model variables, used for per-entity utilities.
struct LinearExpr {
  std::vector<Term> terms;
};

/// Adds a continuous variable M with M >= offset_e + U_e for every entity e
/// and returns its column index. Minimizing M (maximizing -M) makes its
/// optimal value equal the maximum offset-shifted utility. No big-M is
/// needed: utilities are bounded by the surrounding constraint structure.
int linearize_minimax(LinearModel& model, std::span<const LinearExpr> utilities,
                      std::span<const double> offsets);

/// Adds continuous variables M and m with M >= offset_e + U_e and
/// m <= offset_e + U_e for all entities; returns {M, m}. At an optimum that
/// rewards small M - m, the pair equals the true max/min, so M - m is the
/// utility gap. m's lower bound is 0 (utilities are nonnegative).
struct GapVars {
  int max_var = -1;
  int min_var = -1;
};
GapVars linearize_gap(LinearModel& model, std::span<const LinearExpr> utilities,
                      std::span<const double> offsets);

} // namespace tempofair::milp

#endif // TEMPOFAIR_MILP_LINEARIZE_HPP
