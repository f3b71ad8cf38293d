#include "tempofair/milp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "tempofair/errors.hpp"

namespace tempofair::milp {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kRatioTieTol = 1e-9;
constexpr double kSingularTol = 1e-11;
constexpr long kRefactorInterval = 3000;

struct SingularBasis {};

// How an original variable maps onto internal columns. Internally every
// column lives in [0, upper]; originals are recovered via shift/mirror/split.
struct ColumnMap {
  enum class Kind { Shift, Mirror, Split } kind = Kind::Shift;
  int col = -1;
  int neg_col = -1; // Split only
  double base = 0.0; // lower bound (Shift) or upper bound (Mirror)
};

// LP in computational form: equality rows with rhs >= 0, columns in
// [0, upper] stored CSR, slacks/surplus after structurals, artificials last.
// Nonbasic structural columns start on the bound nearest the crash point
// (all-lower when no crash point is given); each row starts with its slack
// or surplus basic when that is feasible there, otherwise with a signed
// artificial, so a good crash point empties phase I.
struct Tableau {
  int rows = 0;
  int cols = 0;
  std::vector<int> col_start; // cols + 1
  std::vector<int> entry_row;
  std::vector<double> entry_coef;
  std::vector<double> upper;
  std::vector<double> cost; // phase-II objective, maximize
  std::vector<double> rhs;
  int first_artificial = 0;
  std::vector<int> initial_basis;        // one column per row
  std::vector<double> initial_diag;      // basis column's diagonal coefficient
  std::vector<char> initial_at_upper;    // nonbasic start statuses
  double rhs_scale = 1.0;
  bool infeasible_by_construction = false;
};

Tableau build_tableau(const LinearModel& model, std::vector<ColumnMap>& maps,
                      const std::vector<double>& lower_override,
                      const std::vector<double>& upper_override,
                      const std::vector<double>& cost_perturb,
                      const double* crash_point) {
  const std::size_t n = model.vars.size();
  Tableau t;
  maps.assign(n, ColumnMap{});

  std::vector<std::vector<Term>> cols; // row/coef pairs per internal column
  std::vector<double> upper, cost;

  const double sense_sign = model.maximize ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lower_override[j];
    const double hi = upper_override[j];
    if (lo > hi) {
      t.infeasible_by_construction = true;
      return t;
    }
    const double cj = sense_sign * model.objective[j] + cost_perturb[j];
    ColumnMap& cm = maps[j];
    if (std::isfinite(lo)) {
      cm.kind = ColumnMap::Kind::Shift;
      cm.base = lo;
      cm.col = static_cast<int>(cols.size());
      cols.emplace_back();
      upper.push_back(std::max(0.0, hi - lo));
      cost.push_back(cj);
    } else if (std::isfinite(hi)) {
      cm.kind = ColumnMap::Kind::Mirror;
      cm.base = hi;
      cm.col = static_cast<int>(cols.size());
      cols.emplace_back();
      upper.push_back(kInfinity);
      cost.push_back(-cj);
    } else {
      cm.kind = ColumnMap::Kind::Split;
      cm.col = static_cast<int>(cols.size());
      cols.emplace_back();
      upper.push_back(kInfinity);
      cost.push_back(cj);
      cm.neg_col = static_cast<int>(cols.size());
      cols.emplace_back();
      upper.push_back(kInfinity);
      cost.push_back(-cj);
    }
  }

  t.rows = static_cast<int>(model.cons.size());
  t.rhs.resize(static_cast<std::size_t>(t.rows));
  std::vector<Sense> eff_sense(model.cons.size());
  std::vector<double> row_sign(model.cons.size(), 1.0);

  for (std::size_t i = 0; i < model.cons.size(); ++i) {
    const Constraint& con = model.cons[i];
    double b = con.rhs;
    for (const Term& term : con.terms) {
      const ColumnMap& cm = maps[static_cast<std::size_t>(term.var)];
      if (cm.kind != ColumnMap::Kind::Split) b -= term.coef * cm.base;
    }
    eff_sense[i] = con.sense;
    if (b < 0.0) {
      row_sign[i] = -1.0;
      b = -b;
      if (con.sense == Sense::LessEqual) eff_sense[i] = Sense::GreaterEqual;
      else if (con.sense == Sense::GreaterEqual) eff_sense[i] = Sense::LessEqual;
    }
    t.rhs[i] = b;
    t.rhs_scale = std::max(t.rhs_scale, b);
  }

  for (std::size_t i = 0; i < model.cons.size(); ++i) {
    for (const Term& term : model.cons[i].terms) {
      const ColumnMap& cm = maps[static_cast<std::size_t>(term.var)];
      const double sign = row_sign[i];
      const auto push = [&](int col, double extra_sign) {
        const double coef = sign * extra_sign * term.coef;
        if (coef != 0.0) {
          cols[static_cast<std::size_t>(col)].push_back({static_cast<int>(i), coef});
        }
      };
      push(cm.col, cm.kind == ColumnMap::Kind::Mirror ? -1.0 : 1.0);
      if (cm.kind == ColumnMap::Kind::Split) push(cm.neg_col, -1.0);
    }
  }

  // Nonbasic starting statuses: park each bounded structural column on the
  // bound nearest the crash point (binaries land exactly).
  t.initial_at_upper.assign(cols.size(), 0);
  if (crash_point != nullptr) {
    for (std::size_t j = 0; j < n; ++j) {
      const ColumnMap& cm = maps[j];
      if (cm.kind != ColumnMap::Kind::Shift) continue;
      const std::size_t col = static_cast<std::size_t>(cm.col);
      if (!std::isfinite(upper[col]) || upper[col] <= 0.0) continue;
      const double internal =
          std::clamp(crash_point[j] - cm.base, 0.0, upper[col]);
      if (internal > upper[col] - internal) t.initial_at_upper[col] = 1;
    }
  }

  // Row residuals at the crash statuses decide the starting basis.
  std::vector<double> residual(t.rhs);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (!t.initial_at_upper[j]) continue;
    for (const Term& e : cols[j]) {
      residual[static_cast<std::size_t>(e.var)] -= e.coef * upper[j];
    }
  }

  t.initial_basis.assign(static_cast<std::size_t>(t.rows), -1);
  t.initial_diag.assign(static_cast<std::size_t>(t.rows), 1.0);
  for (std::size_t i = 0; i < model.cons.size(); ++i) {
    if (eff_sense[i] == Sense::Equal) continue;
    const double coef = eff_sense[i] == Sense::LessEqual ? 1.0 : -1.0;
    const int col = static_cast<int>(cols.size());
    cols.push_back({{static_cast<int>(i), coef}});
    upper.push_back(kInfinity);
    cost.push_back(0.0);
    if (residual[i] * coef >= 0.0) {
      t.initial_basis[i] = col; // slack/surplus basic and within bounds
      t.initial_diag[i] = coef;
    }
  }
  t.first_artificial = static_cast<int>(cols.size());
  for (std::size_t i = 0; i < model.cons.size(); ++i) {
    if (t.initial_basis[i] >= 0) continue;
    const double coef = residual[i] >= 0.0 ? 1.0 : -1.0;
    const int art = static_cast<int>(cols.size());
    cols.push_back({{static_cast<int>(i), coef}});
    upper.push_back(kInfinity);
    cost.push_back(0.0);
    t.initial_basis[i] = art;
    t.initial_diag[i] = coef;
  }
  t.initial_at_upper.resize(cols.size(), 0);

  t.cols = static_cast<int>(cols.size());
  t.upper = std::move(upper);
  t.cost = std::move(cost);
  t.col_start.assign(static_cast<std::size_t>(t.cols) + 1, 0);
  std::size_t nnz = 0;
  for (const auto& c : cols) nnz += c.size();
  t.entry_row.reserve(nnz);
  t.entry_coef.reserve(nnz);
  for (int j = 0; j < t.cols; ++j) {
    t.col_start[static_cast<std::size_t>(j)] = static_cast<int>(t.entry_row.size());
    for (const Term& e : cols[static_cast<std::size_t>(j)]) {
      t.entry_row.push_back(e.var);
      t.entry_coef.push_back(e.coef);
    }
  }
  t.col_start[static_cast<std::size_t>(t.cols)] = static_cast<int>(t.entry_row.size());
  return t;
}

// Bounded-variable primal simplex with an explicit basis inverse. Pricing is
// devex (reference framework) with a permanent switch to Bland's rule when
// the objective stalls, which guarantees termination under degeneracy.
class Simplex {
public:
  explicit Simplex(const Tableau& t)
      : t_(t),
        m_(static_cast<std::size_t>(t.rows)),
        basis_(t.initial_basis),
        at_upper_(static_cast<std::size_t>(t.cols), 0),
        is_basic_(static_cast<std::size_t>(t.cols), 0),
        x_(static_cast<std::size_t>(t.cols), 0.0),
        binv_(m_ * m_, 0.0),
        weight_(static_cast<std::size_t>(t.cols), 1.0),
        duals_(m_, 0.0),
        work_col_(m_, 0.0),
        d_(static_cast<std::size_t>(t.cols), 0.0) {
    std::vector<double> residual(t_.rhs);
    for (int j = 0; j < t_.cols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      if (!t_.initial_at_upper[js]) continue;
      at_upper_[js] = 1;
      x_[js] = t_.upper[js];
      for (int k = t_.col_start[js]; k < t_.col_start[js + 1]; ++k) {
        residual[static_cast<std::size_t>(t_.entry_row[static_cast<std::size_t>(k)])] -=
            t_.entry_coef[static_cast<std::size_t>(k)] * x_[js];
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      binv_[i * m_ + i] = 1.0 / t_.initial_diag[i];
      const int col = basis_[i];
      is_basic_[static_cast<std::size_t>(col)] = 1;
      at_upper_[static_cast<std::size_t>(col)] = 0;
      x_[static_cast<std::size_t>(col)] = residual[i] / t_.initial_diag[i];
    }
  }

  enum class PhaseResult { Optimal, Unbounded };

  // Maximizes `cost` from the current basis. Columns at or beyond
  // `fixed_above` are treated as fixed at zero (freezes artificials in
  // phase II). Reduced costs are maintained incrementally from the pivot row
  // and recomputed exactly before optimality is declared.
  PhaseResult optimize(const std::vector<double>& cost, int fixed_above) {
    long stalled = 0;
    bool bland = false;
    std::fill(weight_.begin(), weight_.end(), 1.0);
    compute_reduced_costs(cost);
    long pivots_since_pricing = 0;
    bool exact_pricing = true;
    const long iter_cap = 200000 + 200L * static_cast<long>(t_.cols + t_.rows);
    for (long iter = 0; iter < iter_cap; ++iter) {
      if (pivots_since_refactor_ > kRefactorInterval) {
        refactor();
        compute_reduced_costs(cost);
        pivots_since_pricing = 0;
        exact_pricing = true;
      }
      if (pivots_since_pricing > 200) {
        compute_reduced_costs(cost);
        pivots_since_pricing = 0;
        exact_pricing = true;
      }

      int enter = choose_entering(fixed_above, bland);
      if (enter < 0) {
        if (exact_pricing) return PhaseResult::Optimal;
        compute_reduced_costs(cost);
        pivots_since_pricing = 0;
        exact_pricing = true;
        enter = choose_entering(fixed_above, bland);
        if (enter < 0) return PhaseResult::Optimal;
      }

      ftran(enter, work_col_);
      const std::size_t je = static_cast<std::size_t>(enter);
      const double sigma = at_upper_[je] ? -1.0 : 1.0;

      // Ratio test with a relative tie window; among blocking rows within
      // the window the largest pivot wins (smallest basis index under
      // Bland's rule), which keeps the inverse well conditioned.
      double limit = upper_of(enter, fixed_above);
      int block_row = -1;
      bool block_to_upper = false;
      const auto strictly_better = [&](double r) {
        if (!std::isfinite(limit)) return true;
        return r < limit - 1e-7 * (1.0 + std::abs(limit));
      };
      const auto within_tie = [&](double r) {
        return std::isfinite(limit) && r < limit + 1e-7 * (1.0 + std::abs(limit));
      };
      for (std::size_t i = 0; i < m_; ++i) {
        const double delta = sigma * work_col_[i];
        const int bc = basis_[i];
        if (delta > kPivotTol) {
          const double r = x_[static_cast<std::size_t>(bc)] / delta;
          if (strictly_better(r)) {
            limit = std::max(r, 0.0);
            block_row = static_cast<int>(i);
            block_to_upper = false;
          } else if (within_tie(r) && block_row >= 0 &&
                     prefer_row(bland, static_cast<int>(i), block_row)) {
            block_row = static_cast<int>(i);
            block_to_upper = false;
          }
        } else if (delta < -kPivotTol) {
          const double ub = upper_of(bc, fixed_above);
          if (!std::isfinite(ub)) continue;
          const double r = (ub - x_[static_cast<std::size_t>(bc)]) / (-delta);
          if (strictly_better(r)) {
            limit = std::max(r, 0.0);
            block_row = static_cast<int>(i);
            block_to_upper = true;
          } else if (within_tie(r) && block_row >= 0 &&
                     prefer_row(bland, static_cast<int>(i), block_row)) {
            block_row = static_cast<int>(i);
            block_to_upper = true;
          }
        }
      }

      if (!std::isfinite(limit)) return PhaseResult::Unbounded;
      limit = std::max(limit, 0.0);

      if (limit <= 1e-12) {
        if (++stalled > 500 + 5L * static_cast<long>(m_)) bland = true;
      } else {
        stalled = 0;
      }

      x_[je] += sigma * limit;
      if (limit > 0.0) {
        for (std::size_t i = 0; i < m_; ++i) {
          if (work_col_[i] != 0.0) {
            x_[static_cast<std::size_t>(basis_[i])] -= sigma * limit * work_col_[i];
          }
        }
      }

      if (block_row < 0) {
        // Bound flip: no basis change, reduced costs unchanged.
        at_upper_[je] = at_upper_[je] ? 0 : 1;
        x_[je] = at_upper_[je] ? upper_of(enter, fixed_above) : 0.0;
        continue;
      }

      update_pivot_row(enter, static_cast<std::size_t>(block_row), bland);

      const int leave = basis_[static_cast<std::size_t>(block_row)];
      const std::size_t jl = static_cast<std::size_t>(leave);
      x_[jl] = block_to_upper ? upper_of(leave, fixed_above) : 0.0;
      at_upper_[jl] = block_to_upper ? 1 : 0;
      is_basic_[jl] = 0;

      basis_[static_cast<std::size_t>(block_row)] = enter;
      is_basic_[je] = 1;
      at_upper_[je] = 0;

      update_binv(work_col_, static_cast<std::size_t>(block_row));
      ++pivots_since_refactor_;
      ++pivots_since_pricing;
      exact_pricing = false;
    }
    throw NumericalError("simplex: iteration limit exceeded");
  }

  double infeasibility(const std::vector<double>& phase1_cost) const {
    double z = 0.0;
    for (std::size_t j = 0; j < phase1_cost.size(); ++j) {
      if (phase1_cost[j] != 0.0) z += phase1_cost[j] * x_[j];
    }
    return -z;
  }

  double initial_infeasibility() const {
    double z = 0.0;
    for (int j = t_.first_artificial; j < t_.cols; ++j) {
      z += x_[static_cast<std::size_t>(j)];
    }
    return z;
  }

  double value(int col) const { return x_[static_cast<std::size_t>(col)]; }
  bool basic(int col) const { return is_basic_[static_cast<std::size_t>(col)] != 0; }
  bool parked_at_upper(int col) const {
    return at_upper_[static_cast<std::size_t>(col)] != 0;
  }

  /// Exact reduced cost of one column under `cost` (recomputes duals once
  /// when stale).
  void refresh_duals(const std::vector<double>& cost) { compute_duals(cost); }
  double exact_reduced_cost(const std::vector<double>& cost, int j) const {
    double d = cost[static_cast<std::size_t>(j)];
    for (int k = t_.col_start[static_cast<std::size_t>(j)];
         k < t_.col_start[static_cast<std::size_t>(j) + 1]; ++k) {
      d -= duals_[static_cast<std::size_t>(t_.entry_row[static_cast<std::size_t>(k)])] *
           t_.entry_coef[static_cast<std::size_t>(k)];
    }
    return d;
  }

  // Residual check; refactors and returns false when basic values drifted.
  bool verify_and_repair() {
    const double tol = 1e-7 * t_.rhs_scale;
    std::vector<double> lhs(m_, 0.0);
    for (int j = 0; j < t_.cols; ++j) {
      const double xv = x_[static_cast<std::size_t>(j)];
      if (xv == 0.0) continue;
      for (int k = t_.col_start[static_cast<std::size_t>(j)];
           k < t_.col_start[static_cast<std::size_t>(j) + 1]; ++k) {
        lhs[static_cast<std::size_t>(t_.entry_row[static_cast<std::size_t>(k)])] +=
            t_.entry_coef[static_cast<std::size_t>(k)] * xv;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (std::abs(lhs[i] - t_.rhs[i]) > tol) {
        refactor();
        return false;
      }
    }
    return true;
  }

private:
  double upper_of(int col, int fixed_above) const {
    if (col >= fixed_above) return 0.0;
    return t_.upper[static_cast<std::size_t>(col)];
  }

  bool prefer_row(bool bland, int cand, int incumbent_row) const {
    if (bland) {
      return basis_[static_cast<std::size_t>(cand)] <
             basis_[static_cast<std::size_t>(incumbent_row)];
    }
    return std::abs(work_col_[static_cast<std::size_t>(cand)]) >
           std::abs(work_col_[static_cast<std::size_t>(incumbent_row)]);
  }

  void compute_duals(const std::vector<double>& cost) {
    std::fill(duals_.begin(), duals_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[static_cast<std::size_t>(basis_[i])];
      if (cb == 0.0) continue;
      const double* row = binv_.data() + i * m_;
      for (std::size_t k = 0; k < m_; ++k) duals_[k] += cb * row[k];
    }
  }

  void compute_reduced_costs(const std::vector<double>& cost) {
    compute_duals(cost);
    for (int j = 0; j < t_.cols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      if (is_basic_[js]) {
        d_[js] = 0.0;
        continue;
      }
      double d = cost[js];
      for (int k = t_.col_start[js]; k < t_.col_start[js + 1]; ++k) {
        d -= duals_[static_cast<std::size_t>(t_.entry_row[static_cast<std::size_t>(k)])] *
             t_.entry_coef[static_cast<std::size_t>(k)];
      }
      d_[js] = d;
    }
  }

  int choose_entering(int fixed_above, bool bland) const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < t_.cols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      if (is_basic_[js]) continue;
      if (upper_of(j, fixed_above) <= 0.0) continue; // fixed or frozen column
      const double d = d_[js];
      double violation;
      if (!at_upper_[js] && d > kReducedCostTol) violation = d;
      else if (at_upper_[js] && d < -kReducedCostTol) violation = -d;
      else continue;
      if (bland) return j;
      const double score = violation * violation / weight_[js];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  void ftran(int col, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (int k = t_.col_start[static_cast<std::size_t>(col)];
         k < t_.col_start[static_cast<std::size_t>(col) + 1]; ++k) {
      const std::size_t r = static_cast<std::size_t>(t_.entry_row[static_cast<std::size_t>(k)]);
      const double coef = t_.entry_coef[static_cast<std::size_t>(k)];
      const double* bcol = binv_.data() + r; // strided column access
      for (std::size_t i = 0; i < m_; ++i) out[i] += bcol[i * m_] * coef;
    }
  }

  // One pass over the pivot row, done before the basis changes: devex
  // reference-framework weight update and the incremental reduced-cost
  // update d_j -= (d_q / alpha_q) * alpha_j.
  void update_pivot_row(int enter, std::size_t pivot_row, bool bland) {
    const double alpha_q = work_col_[pivot_row];
    if (std::abs(alpha_q) < kPivotTol) return;
    const std::size_t qe = static_cast<std::size_t>(enter);
    const double theta = d_[qe] / alpha_q;
    const double wq = std::max(weight_[qe], 1.0);
    const double* rho = binv_.data() + pivot_row * m_;
    double max_w = 0.0;
    for (int j = 0; j < t_.cols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      if (is_basic_[js] || j == enter) continue;
      double alpha_j = 0.0;
      for (int k = t_.col_start[js]; k < t_.col_start[js + 1]; ++k) {
        alpha_j += rho[t_.entry_row[static_cast<std::size_t>(k)]] *
                   t_.entry_coef[static_cast<std::size_t>(k)];
      }
      if (alpha_j == 0.0) continue;
      d_[js] -= theta * alpha_j;
      if (!bland) {
        const double cand = (alpha_j / alpha_q) * (alpha_j / alpha_q) * wq;
        if (cand > weight_[js]) weight_[js] = cand;
        max_w = std::max(max_w, weight_[js]);
      }
    }
    const std::size_t leave =
        static_cast<std::size_t>(basis_[pivot_row]); // becomes nonbasic
    d_[leave] = -theta;
    d_[qe] = 0.0;
    if (!bland) {
      weight_[leave] = std::max(wq / (alpha_q * alpha_q), 1.0);
      if (max_w > 1e8) std::fill(weight_.begin(), weight_.end(), 1.0);
    }
  }

  void update_binv(const std::vector<double>& w, std::size_t pivot_row) {
    const double pivot = w[pivot_row];
    if (std::abs(pivot) < 1e-9) throw SingularBasis{};
    double* prow = binv_.data() + pivot_row * m_;
    const double inv = 1.0 / pivot;
    for (std::size_t k = 0; k < m_; ++k) prow[k] *= inv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == pivot_row) continue;
      const double f = w[i];
      if (f == 0.0) continue;
      double* row = binv_.data() + i * m_;
      for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
    }
  }

  // Rebuilds the inverse from the basis columns (Gauss-Jordan with partial
  // pivoting) and recomputes basic values from the nonbasic ones.
  void refactor() {
    std::vector<double> b(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t col = static_cast<std::size_t>(basis_[i]);
      for (int k = t_.col_start[col]; k < t_.col_start[col + 1]; ++k) {
        b[static_cast<std::size_t>(t_.entry_row[static_cast<std::size_t>(k)]) * m_ + i] =
            t_.entry_coef[static_cast<std::size_t>(k)];
      }
    }
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      double best = std::abs(b[c * m_ + c]);
      for (std::size_t r = c + 1; r < m_; ++r) {
        const double v = std::abs(b[r * m_ + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < kSingularTol) throw SingularBasis{};
      if (piv != c) {
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(b[piv * m_ + k], b[c * m_ + k]);
          std::swap(inv[piv * m_ + k], inv[c * m_ + k]);
        }
      }
      const double p = 1.0 / b[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        b[c * m_ + k] *= p;
        inv[c * m_ + k] *= p;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = b[r * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          b[r * m_ + k] -= f * b[c * m_ + k];
          inv[r * m_ + k] -= f * inv[c * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);
    pivots_since_refactor_ = 0;

    std::vector<double> rhs_eff(t_.rhs);
    for (int j = 0; j < t_.cols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      if (is_basic_[js] || x_[js] == 0.0) continue;
      for (int k = t_.col_start[js]; k < t_.col_start[js + 1]; ++k) {
        rhs_eff[static_cast<std::size_t>(t_.entry_row[static_cast<std::size_t>(k)])] -=
            t_.entry_coef[static_cast<std::size_t>(k)] * x_[js];
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      const double* row = binv_.data() + i * m_;
      for (std::size_t k = 0; k < m_; ++k) v += row[k] * rhs_eff[k];
      x_[static_cast<std::size_t>(basis_[i])] = v;
    }
  }

  const Tableau& t_;
  std::size_t m_;
  std::vector<int> basis_;
  std::vector<char> at_upper_;
  std::vector<char> is_basic_;
  std::vector<double> x_;
  std::vector<double> binv_;
  std::vector<double> weight_;
  std::vector<double> duals_;
  std::vector<double> work_col_;
  std::vector<double> d_;
  long pivots_since_refactor_ = 0;
};

SolveResult solve_once(const LinearModel& model,
                       const std::vector<double>& lower,
                       const std::vector<double>& upper,
                       const std::vector<double>& cost_perturb,
                       const double* crash_point) {
  SolveResult result;
  result.lp_count = 1;

  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    if (lower[j] > upper[j] + kTolerance) {
      result.status = SolveStatus::Infeasible;
      return result;
    }
  }
  for (const Constraint& con : model.cons) {
    if (!con.terms.empty()) continue;
    const bool ok = (con.sense == Sense::LessEqual && 0.0 <= con.rhs + kTolerance) ||
                    (con.sense == Sense::GreaterEqual && 0.0 >= con.rhs - kTolerance) ||
                    (con.sense == Sense::Equal && std::abs(con.rhs) <= kTolerance);
    if (!ok) {
      result.status = SolveStatus::Infeasible;
      return result;
    }
  }

  std::vector<ColumnMap> maps;
  const Tableau t =
      build_tableau(model, maps, lower, upper, cost_perturb, crash_point);
  if (t.infeasible_by_construction) {
    result.status = SolveStatus::Infeasible;
    return result;
  }

  Simplex simplex(t);

  if (t.first_artificial < t.cols &&
      simplex.initial_infeasibility() > 1e-9 * t.rhs_scale) {
    std::vector<double> phase1(static_cast<std::size_t>(t.cols), 0.0);
    for (int j = t.first_artificial; j < t.cols; ++j) {
      phase1[static_cast<std::size_t>(j)] = -1.0;
    }
    const auto pr = simplex.optimize(phase1, t.cols);
    if (pr == Simplex::PhaseResult::Unbounded) {
      throw NumericalError("simplex: phase I reported unbounded");
    }
    if (simplex.infeasibility(phase1) > 1e-7 * t.rhs_scale) {
      result.status = SolveStatus::Infeasible;
      return result;
    }
  }

  for (int attempt = 0;; ++attempt) {
    const auto pr = simplex.optimize(t.cost, t.first_artificial);
    if (pr == Simplex::PhaseResult::Unbounded) {
      result.status = SolveStatus::Unbounded;
      return result;
    }
    if (simplex.verify_and_repair() || attempt >= 2) break;
  }

  result.status = SolveStatus::Optimal;
  result.assignment.resize(model.vars.size());
  result.reduced_costs.assign(model.vars.size(), 0.0);
  result.bound_status.assign(model.vars.size(), 0);
  simplex.refresh_duals(t.cost);
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    const ColumnMap& cm = maps[j];
    double v;
    switch (cm.kind) {
      case ColumnMap::Kind::Shift: v = cm.base + simplex.value(cm.col); break;
      case ColumnMap::Kind::Mirror: v = cm.base - simplex.value(cm.col); break;
      case ColumnMap::Kind::Split:
        v = simplex.value(cm.col) - simplex.value(cm.neg_col);
        break;
      default: v = 0.0; break;
    }
    if (std::isfinite(lower[j]) && std::abs(v - lower[j]) < 1e-9) v = lower[j];
    if (std::isfinite(upper[j]) && std::abs(v - upper[j]) < 1e-9) v = upper[j];
    result.assignment[j] = v;

    if (cm.kind != ColumnMap::Kind::Split && !simplex.basic(cm.col)) {
      const double d_int = simplex.exact_reduced_cost(t.cost, cm.col);
      if (cm.kind == ColumnMap::Kind::Shift) {
        result.bound_status[j] = simplex.parked_at_upper(cm.col) ? 2 : 1;
        result.reduced_costs[j] = d_int;
      } else { // Mirror: internal lower corresponds to the original upper
        result.bound_status[j] = simplex.parked_at_upper(cm.col) ? 1 : 2;
        result.reduced_costs[j] = -d_int;
      }
    }
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    obj += model.objective[j] * result.assignment[j];
  }
  result.objective_value = obj;
  return result;
}

} // namespace

SolveResult simplex_solve_bounded(const LinearModel& model,
                                  const std::vector<double>& lower,
                                  const std::vector<double>& upper,
                                  const double* crash_point) {
  std::vector<double> no_perturb(model.vars.size(), 0.0);
  try {
    return solve_once(model, lower, upper, no_perturb, crash_point);
  } catch (const SingularBasis&) {
    // Deterministic tiny objective perturbation, then retry once.
    double scale = 0.0;
    for (double c : model.objective) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) scale = 1.0;
    std::vector<double> perturb(model.vars.size());
    for (std::size_t j = 0; j < perturb.size(); ++j) {
      perturb[j] = 1e-9 * scale * static_cast<double>((j % 7) + 1) / 7.0;
    }
    try {
      return solve_once(model, lower, upper, perturb, crash_point);
    } catch (const SingularBasis&) {
      throw NumericalError(
          "simplex: singular basis persisted after perturbed restart (" +
          std::to_string(model.vars.size()) + " vars, " +
          std::to_string(model.cons.size()) + " rows)");
    }
  }
}

SolveResult simplex_solve(const LinearModel& model) {
  model.validate();
  std::vector<double> lower(model.vars.size()), upper(model.vars.size());
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    lower[j] = model.vars[j].lower;
    upper[j] = model.vars[j].upper;
  }
  return simplex_solve_bounded(model, lower, upper, nullptr);
}

} // namespace tempofair::milp
