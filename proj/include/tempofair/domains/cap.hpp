/**
 * @file cap.hpp
 * @brief Course assignment: lecturers take full or half course loads.
 */

#ifndef TEMPOFAIR_DOMAINS_CAP_HPP
#define TEMPOFAIR_DOMAINS_CAP_HPP

#include "tempofair/domains/instance.hpp"

namespace tempofair {

/// Course assignment instance. Each course must be covered with total load
/// exactly 1: either one full lecturer or two distinct half-load lecturers
/// (loads are 0, 0.5 or 1). Quality rewards skill-weighted loads, normalized
/// by q_max. `unavailable[step]` lists lecturers that carry load 0 at that
/// step (sabbaticals and other forecasts); steps beyond the list have
/// everyone available.
class CapInstance : public DomainInstance {
public:
  CapInstance(std::vector<std::string> lecturers, std::vector<std::string> courses,
              std::vector<std::vector<double>> skill, double q_max,
              std::vector<std::vector<int>> unavailable = {});

  const std::string& domain_name() const override;
  const std::vector<std::string>& entities() const override { return lecturers_; }
  Metric default_metric() const override { return Metric::RelativeMaxMin; }
  bool quality_is_cost() const override { return false; }
  Backend natural_backend() const override { return Backend::Enumeration; }

  void enumerate(int step, const CandidateFn& fn) const override;
  StepSolution evaluate(int step, const std::vector<double>& vars) const override;
  std::string describe(const StepSolution& sol) const override;

  std::size_t n_lecturers() const { return lecturers_.size(); }
  std::size_t n_courses() const { return courses_.size(); }
  const std::vector<std::string>& courses() const { return courses_; }
  const std::vector<std::vector<double>>& skill() const { return skill_; }
  double q_max() const { return q_max_; }
  const std::vector<std::vector<int>>& unavailable() const { return unavailable_; }
  bool available(int step, int lecturer) const;

  /// var index of x[lecturer, course] in the canonical encoding
  std::size_t var_index(std::size_t lecturer, std::size_t course) const {
    return lecturer * courses_.size() + course;
  }

private:
  double quality_of(const std::vector<double>& vars) const;

  std::vector<std::string> lecturers_;
  std::vector<std::string> courses_;
  std::vector<std::vector<double>> skill_; // lecturer x course
  double q_max_;
  std::vector<std::vector<int>> unavailable_; // per step, lecturer indices
};

} // namespace tempofair

#endif // TEMPOFAIR_DOMAINS_CAP_HPP
