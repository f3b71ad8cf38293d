/**
 * @file instance.hpp
 * @brief Common surface the scoring/solving layer sees for every domain.
 *
 * A domain instance owns its data (skills, distances, costs, preferences),
 * knows its feasible candidate space, and can either stream candidates
 * (enumeration backend) or compile itself into an integer program (MILP
 * backend). Per-step structure (availability forecasts, per-period cost
 * matrices) is addressed with a step index into the instance's own timeline.
 */

#ifndef TEMPOFAIR_DOMAINS_INSTANCE_HPP
#define TEMPOFAIR_DOMAINS_INSTANCE_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tempofair/fairness.hpp"
#include "tempofair/milp/model.hpp"

namespace tempofair {

/// One candidate solution for one time step, in the domain's canonical
/// variable encoding. `quality` is already oriented for maximization
/// (cost-style domains store the negated cost there; `raw_quality` keeps the
/// native value for reporting).
struct StepSolution {
  std::vector<double> vars;
  double quality = 0.0;
  double raw_quality = 0.0;
  std::vector<double> utilities;
};

enum class Backend { Auto, Enumeration, Milp };

Backend backend_from_name(const std::string& name);
const char* backend_name(Backend b);

/// Candidate consumer for the enumeration backend; return false to stop.
using CandidateFn = std::function<bool(const StepSolution&)>;

/// What a MILP-backed domain needs to know to compile a (multi-step) model.
struct MilpBuildSpec {
  int first_step = 0;
  int horizon = 1;
  bool include_fairness = false;
  Metric metric = Metric::MinimaxCost;
  double beta = 0.0;
  double tau = 1.0;
  /// Per-entity discounted historical utilities, consumed as additive
  /// offsets inside the linearized fairness term. Empty means all zero.
  std::vector<double> offsets;
};

/// Compiled integer program plus the glue back to domain space.
struct MilpPlan {
  milp::LinearModel model;
  milp::Separator separator; // may be null
  std::function<std::vector<StepSolution>(const std::vector<double>&)> decode;
  /// Heuristic feasible assignment used to warm the incumbent (optional).
  std::optional<std::vector<double>> incumbent_hint;
  /// Branching priorities (empty = uniform); see BranchAndBoundOptions.
  std::vector<int> branch_priority;
  /// Strong-branching LP budget passed to the solver.
  long strong_branch_budget = 160;
};

class DomainInstance {
public:
  virtual ~DomainInstance() = default;

  virtual const std::string& domain_name() const = 0;
  virtual const std::vector<std::string>& entities() const = 0;
  /// The fairness metric the domain's experiments use by default.
  virtual Metric default_metric() const = 0;
  /// True when the native quality is a cost (enters the maximize objective
  /// negated).
  virtual bool quality_is_cost() const = 0;
  virtual Backend natural_backend() const = 0;

  /// Streams every feasible candidate for `step` in the domain's canonical
  /// order. The StepSolution reference is only valid during the callback.
  /// Enumeration-backend domains must implement this.
  virtual void enumerate(int step, const CandidateFn& fn) const;

  /// Validates an externally supplied assignment for `step` and recomputes
  /// quality and utilities. Throws ConstraintViolation naming the violated
  /// constraint.
  virtual StepSolution evaluate(int step, const std::vector<double>& vars) const = 0;

  /// Compiles the planning window into an integer program. MILP-backend
  /// domains must implement this.
  virtual MilpPlan build_milp(const MilpBuildSpec& spec) const;

  /// Human-readable rendering of one step's solution.
  virtual std::string describe(const StepSolution& sol) const;
};

} // namespace tempofair

#endif // TEMPOFAIR_DOMAINS_INSTANCE_HPP
