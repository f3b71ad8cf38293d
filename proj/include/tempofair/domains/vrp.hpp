/**
 * @file vrp.hpp
 * @brief Vehicle routing from a central depot with per-vehicle route lengths
 *        as the fairness utilities.
 */

#ifndef TEMPOFAIR_DOMAINS_VRP_HPP
#define TEMPOFAIR_DOMAINS_VRP_HPP

#include <utility>

#include "tempofair/domains/instance.hpp"

namespace tempofair {

/// Vehicle routing instance on integer grid coordinates. Point 0 is the
/// depot; every other point must be visited exactly once; every vehicle
/// leaves the depot exactly once and returns to it. Distances are Euclidean.
/// Compiles to a three-index arc program whose exponential subtour family is
/// enforced lazily (connected-component cuts on integral points).
class VrpInstance : public DomainInstance {
public:
  VrpInstance(int grid_size, std::pair<int, int> depot,
              std::vector<std::pair<int, int>> other_points, int n_vehicles);

  const std::string& domain_name() const override;
  const std::vector<std::string>& entities() const override { return vehicles_; }
  Metric default_metric() const override { return Metric::MaxMinGap; }
  bool quality_is_cost() const override { return true; }
  Backend natural_backend() const override { return Backend::Milp; }

  StepSolution evaluate(int step, const std::vector<double>& vars) const override;
  MilpPlan build_milp(const MilpBuildSpec& spec) const override;
  std::string describe(const StepSolution& sol) const override;

  int grid_size() const { return grid_size_; }
  std::size_t n_points() const { return points_.size(); } // depot included
  std::size_t n_vehicles() const { return vehicles_.size(); }
  const std::vector<std::pair<int, int>>& points() const { return points_; }
  double distance(std::size_t a, std::size_t b) const {
    return dist_[a * points_.size() + b];
  }

  /// Canonical arc variable order: vehicle-major, then tail, then head,
  /// diagonal arcs excluded.
  std::size_t n_arcs() const {
    return vehicles_.size() * points_.size() * (points_.size() - 1);
  }
  std::size_t arc_index(std::size_t vehicle, std::size_t a, std::size_t b) const;
  /// Inverse of arc_index.
  void arc_of(std::size_t index, std::size_t& vehicle, std::size_t& a,
              std::size_t& b) const;

  /// Per-vehicle route point sequences (depot omitted) from an integral
  /// assignment; throws if the support is not a set of depot-rooted cycles.
  std::vector<std::vector<std::size_t>> routes_of(const std::vector<double>& vars) const;

private:
  int grid_size_;
  std::vector<std::pair<int, int>> points_; // [0] = depot
  std::vector<std::string> vehicles_;
  std::vector<double> dist_;
};

} // namespace tempofair

#endif // TEMPOFAIR_DOMAINS_VRP_HPP
