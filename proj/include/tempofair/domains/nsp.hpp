/**
 * @file nsp.hpp
 * @brief Nurse scheduling: one week of morning/evening shifts.
 */

#ifndef TEMPOFAIR_DOMAINS_NSP_HPP
#define TEMPOFAIR_DOMAINS_NSP_HPP

#include "tempofair/domains/instance.hpp"

namespace tempofair {

/// Nurse scheduling instance over `days` days with a morning and an evening
/// shift per day (shift index = day * 2 + 0/1, mornings first). Exactly one
/// nurse staffs each shift and a nurse works at most one shift per day.
/// Quality rewards seniority on evening shifts (normalized by q_max); nurse
/// utilities are their preference points over assigned shifts.
class NspInstance : public DomainInstance {
public:
  NspInstance(std::vector<std::string> nurses, int days,
              std::vector<double> seniority,
              std::vector<std::vector<int>> preference, // nurse x shift, 0..3
              double q_max);

  const std::string& domain_name() const override;
  const std::vector<std::string>& entities() const override { return nurses_; }
  Metric default_metric() const override { return Metric::MaximinRatio; }
  bool quality_is_cost() const override { return false; }
  Backend natural_backend() const override { return Backend::Enumeration; }

  void enumerate(int step, const CandidateFn& fn) const override;
  StepSolution evaluate(int step, const std::vector<double>& vars) const override;
  std::string describe(const StepSolution& sol) const override;

  std::size_t n_nurses() const { return nurses_.size(); }
  int days() const { return days_; }
  std::size_t n_shifts() const { return static_cast<std::size_t>(days_) * 2; }
  const std::vector<double>& seniority() const { return seniority_; }
  const std::vector<std::vector<int>>& preference() const { return preference_; }
  double q_max() const { return q_max_; }

  /// var index of x[nurse, shift]: shift-major then nurse.
  std::size_t var_index(std::size_t nurse, std::size_t shift) const {
    return shift * nurses_.size() + nurse;
  }

private:
  std::vector<std::string> nurses_;
  int days_;
  std::vector<double> seniority_;
  std::vector<std::vector<int>> preference_;
  double q_max_;
};

} // namespace tempofair

#endif // TEMPOFAIR_DOMAINS_NSP_HPP
