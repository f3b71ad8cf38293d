/**
 * @file tap.hpp
 * @brief Task allocation: square agent/task assignment with per-agent costs.
 */

#ifndef TEMPOFAIR_DOMAINS_TAP_HPP
#define TEMPOFAIR_DOMAINS_TAP_HPP

#include "tempofair/domains/instance.hpp"

namespace tempofair {

/// One period's cost matrix. Square: every agent performs exactly one task
/// and every task is performed exactly once.
struct TapInstance {
  std::vector<std::string> agents;
  std::vector<std::string> tasks;
  std::vector<std::vector<double>> cost; // agent x task

  TapInstance() = default;
  TapInstance(std::vector<std::string> agents_, std::vector<std::string> tasks_,
              std::vector<std::vector<double>> cost_);

  std::size_t size() const { return agents.size(); }
};

/// Min-sum assignment by the Hungarian method in O(n^3). Serves as the
/// independent oracle for the branch-and-bound path and as a warm incumbent.
struct HungarianResult {
  std::vector<int> task_of_agent;
  double total_cost = 0.0;
};
HungarianResult tap_hungarian(const TapInstance& instance);

/// A (possibly multi-period) task allocation problem as seen by the solver.
/// Step k draws its costs from periods()[k]; all periods share the agent
/// list. Compiles to the MILP backend; multi-step windows become one joint
/// program whose fairness totals couple the steps.
class TapSequenceInstance : public DomainInstance {
public:
  explicit TapSequenceInstance(std::vector<TapInstance> periods);

  const std::string& domain_name() const override;
  const std::vector<std::string>& entities() const override;
  Metric default_metric() const override { return Metric::MinimaxCost; }
  bool quality_is_cost() const override { return true; }
  Backend natural_backend() const override { return Backend::Milp; }

  StepSolution evaluate(int step, const std::vector<double>& vars) const override;
  MilpPlan build_milp(const MilpBuildSpec& spec) const override;
  std::string describe(const StepSolution& sol) const override;

  const std::vector<TapInstance>& periods() const { return periods_; }
  std::size_t size() const { return periods_.front().size(); }

private:
  std::vector<TapInstance> periods_;
};

} // namespace tempofair

#endif // TEMPOFAIR_DOMAINS_TAP_HPP
