/**
 * @file fairness.hpp
 * @brief Fairness metrics over per-entity utility vectors, in plain,
 *        historical, discounted-historical, and multi-step form.
 *
 * All metrics are pure functions of per-entity utilities. Temporal variants
 * fold a history of past utility vectors and a planned sequence of future
 * utility vectors into per-entity discounted totals and apply the plain
 * metric to those totals. Nothing here knows about any concrete domain;
 * domains adapt their solutions into UtilityVectors.
 */

#ifndef TEMPOFAIR_FAIRNESS_HPP
#define TEMPOFAIR_FAIRNESS_HPP

#include <span>
#include <string>
#include <vector>

#include "tempofair/errors.hpp"

namespace tempofair {

/// Per-entity nonnegative utilities (loads, distances, costs, preference
/// points) for one solution at one time step. Entity ordering is fixed and
/// must be identical across all vectors used together.
struct UtilityVector {
  std::vector<std::string> entities;
  std::vector<double> values;

  UtilityVector() = default;
  UtilityVector(std::vector<std::string> entities_, std::vector<double> values_);

  std::size_t size() const { return values.size(); }
};

/// Ordered sequence of utility vectors for past time steps, oldest first
/// (steps[0] is the most distant past, steps.back() is the step just before
/// now). May be empty.
struct History {
  std::vector<UtilityVector> steps;

  History() = default;
  explicit History(std::vector<UtilityVector> steps_);

  bool empty() const { return steps.empty(); }
  std::size_t size() const { return steps.size(); }
  /// Entity list shared by all steps; empty history has no entities.
  const std::vector<std::string>& entities() const;
};

/// Geometric discount weights: gamma for past steps, tau for planned future
/// steps. gamma = tau = 1 recovers plain undiscounted sums.
struct DiscountSpec {
  double gamma = 1.0;
  double tau = 1.0;

  DiscountSpec() = default;
  DiscountSpec(double gamma_, double tau_);
};

/// The fairness metrics provided by this library.
enum class Metric {
  RelativeMaxMin,    // 1 - (max - min) / total, in [0, 1]
  QuadraticMaxMinGap,// -((max - min) / 2)^2, in (-inf, 0]
  MaximinRatio,      // min / max, in [0, 1]
  MaxMinGap,         // max - min, lower is fairer
  MinimaxCost,       // max, lower is fairer
};

/// True for metrics whose raw value increases with fairness. MaxMinGap and
/// MinimaxCost are cost-style metrics and return false; callers that need a
/// uniform maximize orientation negate those (see objective.hpp).
bool higher_is_fairer(Metric m);

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);

// --- Discounted totals -----------------------------------------------------

/// Per-entity discounted totals over (history, plan). The step just before
/// now carries weight gamma^1, older steps gamma^2, gamma^3, ...; the first
/// planned step carries tau^0 = 1, later planned steps tau^1, tau^2, ...
/// With gamma = tau = 1 this is the plain per-entity sum over all steps.
/// gamma = 0 erases the history entirely (0^k = 0 for k >= 1).
///
/// Accumulation order is fixed (history oldest to newest, then plan first to
/// last) so that precomputed history offsets (below) extend bit-exactly.
UtilityVector discounted_totals(const History& history,
                                std::span<const UtilityVector> plan,
                                const DiscountSpec& disc);

/// The history part of discounted_totals: per-entity sums of gamma^d * u
/// over past steps only, accumulated oldest to newest. Adding tau-weighted
/// plan utilities on top of these offsets reproduces discounted_totals
/// bit-for-bit.
std::vector<double> discounted_history_offsets(const History& history, double gamma);

// --- Plain metrics ---------------------------------------------------------

/// Relative max-min fairness: 1 - (max - min) / total. 1 when all entities
/// are equal, 0 when one entity holds everything (two-entity case). An
/// all-zero vector is treated as perfectly equal and scores 1.
double rmm(std::span<const double> values);
double rmm(const UtilityVector& u);

/// Quadratic max-min gap: -((max - min) / 2)^2. 0 iff all values equal.
double qmmg(std::span<const double> values);
double qmmg(const UtilityVector& u);

/// Maximin ratio: min / max. 1 iff all equal, 0 iff some entity has zero.
/// An all-zero vector is treated as perfectly equal and scores 1.
double maximin_ratio(std::span<const double> values);
double maximin_ratio(const UtilityVector& u);

/// max - min. Lower is fairer; 0 iff all equal.
double max_min_gap(std::span<const double> values);
double max_min_gap(const UtilityVector& u);

/// max. The classic minimax cost notion; lower is fairer.
double minimax_cost(std::span<const double> values);
double minimax_cost(const UtilityVector& u);

/// Dispatch by tag, same semantics as the named functions above.
double metric_value(Metric m, std::span<const double> values);

// --- Temporal variants -----------------------------------------------------

/// Metric applied to discounted_totals(history, plan, disc). With an empty
/// history this reduces to the plain metric of the tau-weighted plan totals;
/// with gamma = tau = 1 it is the metric over element-wise sums.
double metric_temporal(Metric m, const History& history,
                       std::span<const UtilityVector> plan,
                       const DiscountSpec& disc);

double rmm_temporal(const History& history, std::span<const UtilityVector> plan,
                    const DiscountSpec& disc);
double qmmg_temporal(const History& history, std::span<const UtilityVector> plan,
                     const DiscountSpec& disc);
double maximin_ratio_temporal(const History& history,
                              std::span<const UtilityVector> plan,
                              const DiscountSpec& disc);

// --- Closed-form consistency oracle ----------------------------------------

/// Closed-form trajectory of the discounted-historical relative max-min
/// metric when every step from now on adds a perfectly balanced load of
/// per_step_total split over all entities. Element x equals
/// rmm_temporal(history, balanced plan of length x + 1, {gamma, gamma}).
///
/// Requires every history step to total per_step_total as well. For
/// 0 < gamma < 1:
///   value(x) = 1 - G * gamma^x / (per_step_total * (1 - gamma^(x+T+1)) / (1 - gamma))
/// where G is the discounted historical gap at the current step and T the
/// history length; gamma = 1 uses the limit 1 - G / (total over all steps).
std::vector<double> rmm_balanced_trajectory(const History& history,
                                            double per_step_total,
                                            double gamma, int n_steps);

} // namespace tempofair

#endif // TEMPOFAIR_FAIRNESS_HPP
