#include "tempofair/fairness.hpp"

#include <algorithm>
#include <cmath>

namespace tempofair {

namespace {

void check_entities_match(const std::vector<std::string>& a,
                          const std::vector<std::string>& b,
                          const char* what) {
  if (a != b) {
    throw StructuralError(std::string(what) + ": entity lists differ");
  }
}

// weights[k] = base^k, built by repeated multiplication so results are
// reproducible bit-for-bit (no pow()).
std::vector<double> geometric_weights(double base, std::size_t count) {
  std::vector<double> w(count);
  double acc = 1.0;
  for (std::size_t k = 0; k < count; ++k) {
    w[k] = acc;
    acc *= base;
  }
  return w;
}

} // namespace

UtilityVector::UtilityVector(std::vector<std::string> entities_,
                             std::vector<double> values_)
    : entities(std::move(entities_)), values(std::move(values_)) {
  if (entities.empty()) {
    throw StructuralError("UtilityVector: entity list must be non-empty");
  }
  if (entities.size() != values.size()) {
    throw StructuralError("UtilityVector: entity/value size mismatch");
  }
  for (double v : values) {
    if (!(v >= 0.0)) {
      throw StructuralError("UtilityVector: values must be nonnegative");
    }
  }
}

History::History(std::vector<UtilityVector> steps_) : steps(std::move(steps_)) {
  for (std::size_t i = 1; i < steps.size(); ++i) {
    check_entities_match(steps[0].entities, steps[i].entities, "History");
  }
}

const std::vector<std::string>& History::entities() const {
  static const std::vector<std::string> kEmpty;
  return steps.empty() ? kEmpty : steps.front().entities;
}

DiscountSpec::DiscountSpec(double gamma_, double tau_) : gamma(gamma_), tau(tau_) {
  if (!(gamma >= 0.0 && gamma <= 1.0) || !(tau >= 0.0 && tau <= 1.0)) {
    throw ArgumentError("DiscountSpec: discount factors must lie in [0, 1]");
  }
}

bool higher_is_fairer(Metric m) {
  switch (m) {
    case Metric::RelativeMaxMin:
    case Metric::QuadraticMaxMinGap:
    case Metric::MaximinRatio:
      return true;
    case Metric::MaxMinGap:
    case Metric::MinimaxCost:
      return false;
  }
  throw ArgumentError("unknown metric");
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::RelativeMaxMin: return "rmm";
    case Metric::QuadraticMaxMinGap: return "qmmg";
    case Metric::MaximinRatio: return "maximin-ratio";
    case Metric::MaxMinGap: return "max-min-gap";
    case Metric::MinimaxCost: return "minimax-cost";
  }
  throw ArgumentError("unknown metric");
}

Metric metric_from_name(const std::string& name) {
  if (name == "rmm") return Metric::RelativeMaxMin;
  if (name == "qmmg") return Metric::QuadraticMaxMinGap;
  if (name == "maximin-ratio") return Metric::MaximinRatio;
  if (name == "max-min-gap") return Metric::MaxMinGap;
  if (name == "minimax-cost") return Metric::MinimaxCost;
  throw ArgumentError("unknown metric name: " + name);
}

std::vector<double> discounted_history_offsets(const History& history, double gamma) {
  const std::size_t n = history.entities().size();
  const std::size_t depth = history.size();
  std::vector<double> offsets(n, 0.0);
  // Step just before now has weight gamma^1; the oldest step gamma^depth.
  const std::vector<double> w = geometric_weights(gamma, depth + 1);
  for (std::size_t idx = 0; idx < depth; ++idx) {
    const double weight = w[depth - idx];
    const std::vector<double>& vals = history.steps[idx].values;
    for (std::size_t e = 0; e < n; ++e) {
      offsets[e] += weight * vals[e];
    }
  }
  return offsets;
}

UtilityVector discounted_totals(const History& history,
                                std::span<const UtilityVector> plan,
                                const DiscountSpec& disc) {
  if (plan.empty()) {
    throw ArgumentError("discounted_totals: plan must be non-empty");
  }
  for (const UtilityVector& step : plan) {
    check_entities_match(plan.front().entities, step.entities, "discounted_totals");
  }
  if (!history.empty()) {
    check_entities_match(history.entities(), plan.front().entities,
                         "discounted_totals");
  }

  const std::size_t n = plan.front().entities.size();
  std::vector<double> totals = history.empty()
                                   ? std::vector<double>(n, 0.0)
                                   : discounted_history_offsets(history, disc.gamma);
  const std::vector<double> w = geometric_weights(disc.tau, plan.size());
  for (std::size_t p = 0; p < plan.size(); ++p) {
    for (std::size_t e = 0; e < n; ++e) {
      totals[e] += w[p] * plan[p].values[e];
    }
  }
  return UtilityVector(plan.front().entities, std::move(totals));
}

double rmm(std::span<const double> values) {
  double lo = values[0], hi = values[0], total = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    total += v;
  }
  if (total <= 0.0) return 1.0; // all-zero: treat as perfectly equal
  return 1.0 - (hi - lo) / total;
}

double qmmg(std::span<const double> values) {
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double half_gap = (hi - lo) / 2.0;
  return -(half_gap * half_gap);
}

double maximin_ratio(std::span<const double> values) {
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= 0.0) return 1.0; // all-zero: treat as perfectly equal
  return lo / hi;
}

double max_min_gap(std::span<const double> values) {
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

double minimax_cost(std::span<const double> values) {
  double hi = values[0];
  for (double v : values) hi = std::max(hi, v);
  return hi;
}

double metric_value(Metric m, std::span<const double> values) {
  if (values.empty()) {
    throw ArgumentError("metric_value: empty utility vector");
  }
  switch (m) {
    case Metric::RelativeMaxMin: return rmm(values);
    case Metric::QuadraticMaxMinGap: return qmmg(values);
    case Metric::MaximinRatio: return maximin_ratio(values);
    case Metric::MaxMinGap: return max_min_gap(values);
    case Metric::MinimaxCost: return minimax_cost(values);
  }
  throw ArgumentError("unknown metric");
}

double rmm(const UtilityVector& u) { return rmm(std::span<const double>(u.values)); }
double qmmg(const UtilityVector& u) { return qmmg(std::span<const double>(u.values)); }
double maximin_ratio(const UtilityVector& u) {
  return maximin_ratio(std::span<const double>(u.values));
}
double max_min_gap(const UtilityVector& u) {
  return max_min_gap(std::span<const double>(u.values));
}
double minimax_cost(const UtilityVector& u) {
  return minimax_cost(std::span<const double>(u.values));
}

double metric_temporal(Metric m, const History& history,
                       std::span<const UtilityVector> plan,
                       const DiscountSpec& disc) {
  const UtilityVector totals = discounted_totals(history, plan, disc);
  return metric_value(m, totals.values);
}

double rmm_temporal(const History& history, std::span<const UtilityVector> plan,
                    const DiscountSpec& disc) {
  return metric_temporal(Metric::RelativeMaxMin, history, plan, disc);
}

double qmmg_temporal(const History& history, std::span<const UtilityVector> plan,
                     const DiscountSpec& disc) {
  return metric_temporal(Metric::QuadraticMaxMinGap, history, plan, disc);
}

double maximin_ratio_temporal(const History& history,
                              std::span<const UtilityVector> plan,
                              const DiscountSpec& disc) {
  return metric_temporal(Metric::MaximinRatio, history, plan, disc);
}

std::vector<double> rmm_balanced_trajectory(const History& history,
                                            double per_step_total,
                                            double gamma, int n_steps) {
  if (!(per_step_total > 0.0)) {
    throw ArgumentError("rmm_balanced_trajectory: per_step_total must be > 0");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ArgumentError("rmm_balanced_trajectory: gamma must lie in (0, 1]");
  }
  if (n_steps < 0) {
    throw ArgumentError("rmm_balanced_trajectory: n_steps must be >= 0");
  }

  const std::size_t depth = history.size();
  const std::vector<double> offsets = discounted_history_offsets(history, gamma);
  double gap = 0.0;
  if (!offsets.empty()) {
    const auto [lo, hi] = std::minmax_element(offsets.begin(), offsets.end());
    gap = *hi - *lo;
  }

  std::vector<double> traj;
  traj.reserve(static_cast<std::size_t>(n_steps));
  if (gamma == 1.0) {
    for (int x = 0; x < n_steps; ++x) {
      const double total =
          per_step_total * static_cast<double>(depth + static_cast<std::size_t>(x) + 1);
      traj.push_back(1.0 - gap / total);
    }
    return traj;
  }

  double gamma_x = 1.0;                               // gamma^x
  double gamma_xt1 = std::pow(gamma, static_cast<double>(depth + 1)); // gamma^(x+T+1)
  for (int x = 0; x < n_steps; ++x) {
    const double total = per_step_total * (1.0 - gamma_xt1) / (1.0 - gamma);
    traj.push_back(1.0 - gap * gamma_x / total);
    gamma_x *= gamma;
    gamma_xt1 *= gamma;
  }
  return traj;
}

} // namespace tempofair
