#include "tempofair/domains/nsp.hpp"

#include <cmath>
#include <sstream>

#include "tempofair/errors.hpp"

namespace tempofair {

namespace {
const std::string kDomainName = "nsp";
} // namespace

NspInstance::NspInstance(std::vector<std::string> nurses, int days,
                         std::vector<double> seniority,
                         std::vector<std::vector<int>> preference, double q_max)
    : nurses_(std::move(nurses)),
      days_(days),
      seniority_(std::move(seniority)),
      preference_(std::move(preference)),
      q_max_(q_max) {
  if (nurses_.size() < 2) throw ArgumentError("nsp: needs at least two nurses");
  if (days_ < 1) throw ArgumentError("nsp: needs at least one day");
  if (seniority_.size() != nurses_.size()) {
    throw ArgumentError("nsp: one seniority value per nurse required");
  }
  if (preference_.size() != nurses_.size()) {
    throw ArgumentError("nsp: one preference row per nurse required");
  }
  for (const auto& row : preference_) {
    if (row.size() != n_shifts()) {
      throw ArgumentError("nsp: one preference entry per shift required");
    }
    for (int p : row) {
      if (p < 0 || p > 3) throw ArgumentError("nsp: preferences must be in {0,1,2,3}");
    }
  }
  if (!(q_max_ > 0.0)) throw ArgumentError("nsp: q_max must be positive");
}

const std::string& NspInstance::domain_name() const { return kDomainName; }

void NspInstance::enumerate(int /*step*/, const CandidateFn& fn) const {
  const std::size_t n = nurses_.size();
  const std::size_t shifts = n_shifts();

  StepSolution sol;
  sol.vars.assign(n * shifts, 0.0);
  sol.utilities.assign(n, 0.0);
  double evening_seniority = 0.0;
  std::vector<int> assigned(shifts, -1);
  bool stop = false;

  // DFS over shifts in canonical order (day-major, morning before evening),
  // nurse indices ascending; the same-day pair must use distinct nurses.
  std::function<void(std::size_t)> rec = [&](std::size_t s) {
    if (stop) return;
    if (s == shifts) {
      sol.raw_quality = evening_seniority / q_max_;
      sol.quality = sol.raw_quality;
      if (!fn(sol)) stop = true;
      return;
    }
    const bool evening = (s % 2) == 1;
    for (std::size_t nu = 0; nu < n; ++nu) {
      if (evening && assigned[s - 1] == static_cast<int>(nu)) continue;
      assigned[s] = static_cast<int>(nu);
      sol.vars[var_index(nu, s)] = 1.0;
      sol.utilities[nu] += preference_[nu][s];
      if (evening) evening_seniority += seniority_[nu];
      rec(s + 1);
      if (evening) evening_seniority -= seniority_[nu];
      sol.utilities[nu] -= preference_[nu][s];
      sol.vars[var_index(nu, s)] = 0.0;
      assigned[s] = -1;
      if (stop) return;
    }
  };
  rec(0);
}

StepSolution NspInstance::evaluate(int step, const std::vector<double>& vars) const {
  const std::size_t n = nurses_.size();
  const std::size_t shifts = n_shifts();
  if (vars.size() != n * shifts) {
    throw ArgumentError("nsp: assignment vector has wrong size");
  }

  std::vector<int> assigned(shifts, -1);
  for (std::size_t s = 0; s < shifts; ++s) {
    int count = 0;
    for (std::size_t nu = 0; nu < n; ++nu) {
      const double v = vars[var_index(nu, s)];
      if (v != 0.0 && v != 1.0) {
        throw ConstraintViolation("nsp step " + std::to_string(step) +
                                  ": assignments must be 0/1");
      }
      if (v == 1.0) {
        assigned[s] = static_cast<int>(nu);
        ++count;
      }
    }
    if (count != 1) {
      throw ConstraintViolation("nsp step " + std::to_string(step) + ": shift " +
                                std::to_string(s) + " needs exactly one nurse");
    }
  }
  for (int d = 0; d < days_; ++d) {
    if (assigned[static_cast<std::size_t>(d) * 2] ==
        assigned[static_cast<std::size_t>(d) * 2 + 1]) {
      throw ConstraintViolation("nsp step " + std::to_string(step) + ": nurse " +
                                nurses_[static_cast<std::size_t>(
                                    assigned[static_cast<std::size_t>(d) * 2])] +
                                " works both shifts of day " + std::to_string(d + 1));
    }
  }

  StepSolution sol;
  sol.vars = vars;
  sol.utilities.assign(n, 0.0);
  double evening_seniority = 0.0;
  for (std::size_t s = 0; s < shifts; ++s) {
    const std::size_t nu = static_cast<std::size_t>(assigned[s]);
    sol.utilities[nu] += preference_[nu][s];
    if (s % 2 == 1) evening_seniority += seniority_[nu];
  }
  sol.raw_quality = evening_seniority / q_max_;
  sol.quality = sol.raw_quality;
  return sol;
}

std::string NspInstance::describe(const StepSolution& sol) const {
  std::ostringstream out;
  for (int d = 0; d < days_; ++d) {
    const std::size_t sm = static_cast<std::size_t>(d) * 2;
    int m = -1, e = -1;
    for (std::size_t nu = 0; nu < nurses_.size(); ++nu) {
      if (sol.vars[var_index(nu, sm)] == 1.0) m = static_cast<int>(nu);
      if (sol.vars[var_index(nu, sm + 1)] == 1.0) e = static_cast<int>(nu);
    }
    if (d) out << " ";
    out << "d" << (d + 1) << ":" << (m >= 0 ? nurses_[static_cast<std::size_t>(m)] : "?")
        << "/" << (e >= 0 ? nurses_[static_cast<std::size_t>(e)] : "?");
  }
  return out.str();
}

} // namespace tempofair
