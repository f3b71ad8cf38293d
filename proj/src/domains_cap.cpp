#include "tempofair/domains/cap.hpp"

#include <algorithm>
#include <sstream>

#include "tempofair/errors.hpp"

namespace tempofair {

namespace {
const std::string kDomainName = "cap";

bool is_half(double v) { return v == 0.5; }
bool is_load(double v) { return v == 0.0 || v == 0.5 || v == 1.0; }
} // namespace

CapInstance::CapInstance(std::vector<std::string> lecturers,
                         std::vector<std::string> courses,
                         std::vector<std::vector<double>> skill, double q_max,
                         std::vector<std::vector<int>> unavailable)
    : lecturers_(std::move(lecturers)),
      courses_(std::move(courses)),
      skill_(std::move(skill)),
      q_max_(q_max),
      unavailable_(std::move(unavailable)) {
  if (lecturers_.empty() || courses_.empty()) {
    throw ArgumentError("cap: needs at least one lecturer and one course");
  }
  if (skill_.size() != lecturers_.size()) {
    throw ArgumentError("cap: one skill row per lecturer required");
  }
  for (const auto& row : skill_) {
    if (row.size() != courses_.size()) {
      throw ArgumentError("cap: one skill entry per course required");
    }
    for (double s : row) {
      if (!(s >= 0.0)) throw ArgumentError("cap: skills must be nonnegative");
    }
  }
  if (!(q_max_ > 0.0)) throw ArgumentError("cap: q_max must be positive");
  for (const auto& step : unavailable_) {
    for (int l : step) {
      if (l < 0 || l >= static_cast<int>(lecturers_.size())) {
        throw ArgumentError("cap: unavailable lecturer index out of range");
      }
    }
  }
}

const std::string& CapInstance::domain_name() const { return kDomainName; }

bool CapInstance::available(int step, int lecturer) const {
  if (step < 0 || static_cast<std::size_t>(step) >= unavailable_.size()) return true;
  const auto& out = unavailable_[static_cast<std::size_t>(step)];
  return std::find(out.begin(), out.end(), lecturer) == out.end();
}

double CapInstance::quality_of(const std::vector<double>& vars) const {
  double q = 0.0;
  for (std::size_t l = 0; l < lecturers_.size(); ++l) {
    for (std::size_t c = 0; c < courses_.size(); ++c) {
      q += vars[var_index(l, c)] * skill_[l][c];
    }
  }
  return q / q_max_;
}

void CapInstance::enumerate(int step, const CandidateFn& fn) const {
  const std::size_t nl = lecturers_.size();
  const std::size_t nc = courses_.size();

  std::vector<int> avail;
  for (std::size_t l = 0; l < nl; ++l) {
    if (available(step, static_cast<int>(l))) avail.push_back(static_cast<int>(l));
  }
  if (avail.empty()) {
    throw InfeasibleError("cap: no lecturer available at step " + std::to_string(step));
  }

  // Per-course coverage options: one full lecturer, or two distinct halves.
  struct Option {
    int full = -1;
    int half_a = -1, half_b = -1;
  };
  std::vector<Option> options;
  for (int l : avail) options.push_back({l, -1, -1});
  for (std::size_t i = 0; i < avail.size(); ++i) {
    for (std::size_t j = i + 1; j < avail.size(); ++j) {
      options.push_back({-1, avail[i], avail[j]});
    }
  }
  if (options.empty()) {
    throw InfeasibleError("cap: no coverage option at step " + std::to_string(step));
  }

  // Materialize the product over courses, then emit in canonical order
  // (lexicographic by the flattened lecturer-major load vector).
  std::vector<std::vector<double>> all;
  std::vector<std::size_t> pick(nc, 0);
  std::vector<double> vars(nl * nc, 0.0);
  for (;;) {
    std::fill(vars.begin(), vars.end(), 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
      const Option& o = options[pick[c]];
      if (o.full >= 0) {
        vars[var_index(static_cast<std::size_t>(o.full), c)] = 1.0;
      } else {
        vars[var_index(static_cast<std::size_t>(o.half_a), c)] = 0.5;
        vars[var_index(static_cast<std::size_t>(o.half_b), c)] = 0.5;
      }
    }
    all.push_back(vars);
    std::size_t c = 0;
    while (c < nc && ++pick[c] == options.size()) {
      pick[c] = 0;
      ++c;
    }
    if (c == nc) break;
  }
  std::sort(all.begin(), all.end());

  StepSolution sol;
  sol.utilities.resize(nl);
  for (const std::vector<double>& v : all) {
    sol.vars = v;
    for (std::size_t l = 0; l < nl; ++l) {
      double load = 0.0;
      for (std::size_t c = 0; c < nc; ++c) load += v[var_index(l, c)];
      sol.utilities[l] = load;
    }
    sol.raw_quality = quality_of(v);
    sol.quality = sol.raw_quality;
    if (!fn(sol)) return;
  }
}

StepSolution CapInstance::evaluate(int step, const std::vector<double>& vars) const {
  const std::size_t nl = lecturers_.size();
  const std::size_t nc = courses_.size();
  if (vars.size() != nl * nc) {
    throw ArgumentError("cap: assignment vector has wrong size");
  }
  for (std::size_t c = 0; c < nc; ++c) {
    double total = 0.0;
    int halves = 0;
    for (std::size_t l = 0; l < nl; ++l) {
      const double v = vars[var_index(l, c)];
      if (!is_load(v)) {
        throw ConstraintViolation("cap step " + std::to_string(step) + ": load of " +
                                  lecturers_[l] + " on " + courses_[c] +
                                  " must be 0, 0.5 or 1");
      }
      if (is_half(v)) ++halves;
      if (v > 0.0 && !available(step, static_cast<int>(l))) {
        throw ConstraintViolation("cap step " + std::to_string(step) + ": " +
                                  lecturers_[l] + " is unavailable");
      }
      total += v;
    }
    if (total != 1.0 || (halves != 0 && halves != 2)) {
      throw ConstraintViolation("cap step " + std::to_string(step) + ": course " +
                                courses_[c] +
                                " must be covered with total load exactly 1");
    }
  }

  StepSolution sol;
  sol.vars = vars;
  sol.utilities.resize(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    double load = 0.0;
    for (std::size_t c = 0; c < nc; ++c) load += vars[var_index(l, c)];
    sol.utilities[l] = load;
  }
  sol.raw_quality = quality_of(vars);
  sol.quality = sol.raw_quality;
  return sol;
}

std::string CapInstance::describe(const StepSolution& sol) const {
  std::ostringstream out;
  for (std::size_t l = 0; l < lecturers_.size(); ++l) {
    if (l) out << ", ";
    out << lecturers_[l] << "=" << sol.utilities[l];
  }
  return out.str();
}

} // namespace tempofair
