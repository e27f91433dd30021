#include "diagstab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "diagstab/errors.hpp"

namespace diagstab {

namespace {

constexpr double kReducedCostEps = 1e-11;
constexpr double kPivotStrong = 1e-8;  // preferred minimum pivot magnitude
constexpr double kPivotWeak = 1e-11;   // absolute floor for pivot admission
constexpr double kFeasEps = 1e-9;

// Tableau layout: columns [structural | slack | artificial | rhs], one row per
// constraint plus a reduced-cost row (z_j - c_j) at the end whose rhs cell
// holds the current objective value.
class Tableau {
 public:
  explicit Tableau(const LpProblem& p)
      : m_(p.rhs.size()), n_(p.num_vars), cols_(n_ + m_), basis_(m_, SIZE_MAX) {
    // Rows with negative rhs are sign-flipped and get an artificial basis
    // variable; the others start on their slack.
    for (std::size_t i = 0; i < m_; ++i) {
      if (p.rhs[i] < 0.0) art_rows_.push_back(i);
    }
    art_offset_ = cols_;
    cols_ += art_rows_.size();
    rhs_col_ = cols_;
    rows_.assign(m_ + 1, std::vector<double>(cols_ + 1, 0.0));

    std::size_t art = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = p.rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = sign * p.constraint[i][j];
      rows_[i][n_ + i] = sign;  // slack
      rows_[i][rhs_col_] = sign * p.rhs[i];
      if (sign < 0.0) {
        rows_[i][art_offset_ + art] = 1.0;
        basis_[i] = art_offset_ + art;
        ++art;
      } else {
        basis_[i] = n_ + i;
      }
    }
  }

  bool has_artificials() const { return !art_rows_.empty(); }

  // Phase 1: maximize -(sum of artificials); optimum 0 iff feasible.
  void load_phase1_objective() {
    std::vector<double> c(cols_, 0.0);
    for (std::size_t a = 0; a < art_rows_.size(); ++a) c[art_offset_ + a] = -1.0;
    load_objective(c);
    phase1_ = true;
  }

  void load_phase2_objective(const std::vector<double>& c_structural) {
    std::vector<double> c(cols_, 0.0);
    for (std::size_t j = 0; j < c_structural.size(); ++j) c[j] = c_structural[j];
    load_objective(c);
    phase1_ = false;
  }

  double objective_value() const { return rows_[m_][rhs_col_]; }

  // Returns true at optimality, false if an improving ray is unbounded;
  // throws on pivot budget exhaustion.
  bool optimize() {
    const long budget = 2000 + 200 * static_cast<long>(m_ + cols_);
    long stalled = 0;
    bool bland = false;
    for (long it = 0; it < budget; ++it) {
      const std::size_t enter = pick_entering(bland);
      if (enter == SIZE_MAX) return true;
      const std::size_t leave = pick_leaving(enter, bland);
      if (leave == SIZE_MAX) return false;
      const double before = objective_value();
      pivot(leave, enter);
      if (objective_value() <= before + 1e-15 * (1.0 + std::fabs(before))) {
        if (++stalled > static_cast<long>(2 * (m_ + cols_))) bland = true;
      } else {
        stalled = 0;
      }
    }
    throw LpFailure("simplex: pivot budget exhausted (" + std::to_string(budget) + " pivots)");
  }

  std::vector<double> extract(std::size_t num_vars) const {
    std::vector<double> x(num_vars, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < num_vars) x[basis_[i]] = rows_[i][rhs_col_];
    }
    return x;
  }

  // After a zero-objective phase 1, pivot artificials out of the basis where
  // possible; rows where no structural/slack column is usable are redundant
  // and keep a zero-valued artificial (re-entry is blocked in phase 2).
  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art_offset_) continue;
      for (std::size_t j = 0; j < art_offset_; ++j) {
        if (std::fabs(rows_[i][j]) > kPivotStrong) {
          pivot(i, j);
          break;
        }
      }
    }
  }

 private:
  // Installs the reduced-cost row z_j - c_j for objective c and current basis.
  void load_objective(const std::vector<double>& c) {
    auto& obj = rows_[m_];
    for (std::size_t j = 0; j < cols_; ++j) obj[j] = -c[j];
    obj[rhs_col_] = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double coef = obj[basis_[i]];
      if (coef == 0.0) continue;
      for (std::size_t j = 0; j <= rhs_col_; ++j) obj[j] -= coef * rows_[i][j];
    }
  }

  bool column_allowed(std::size_t j) const { return phase1_ || j < art_offset_; }

  std::size_t pick_entering(bool bland) const {
    const auto& obj = rows_[m_];
    std::size_t best = SIZE_MAX;
    double best_val = -kReducedCostEps;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (!column_allowed(j)) continue;
      if (obj[j] < best_val) {
        if (bland) return j;
        best_val = obj[j];
        best = j;
      }
    }
    return best;
  }

  // Ratio test over every admissible pivot (exact minimum ratio; excluding
  // small binding rows would silently break primal feasibility). Among rows
  // tied at the exact minimum the largest pivot element wins for numerical
  // stability; under Bland's rule the smallest basis index wins instead,
  // which restores the anti-cycling guarantee.
  std::size_t pick_leaving(std::size_t enter, bool bland) const {
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = rows_[i][enter];
      if (a > kPivotWeak) min_ratio = std::min(min_ratio, rows_[i][rhs_col_] / a);
    }
    if (min_ratio == std::numeric_limits<double>::infinity()) return SIZE_MAX;

    std::size_t best = SIZE_MAX;
    double best_pivot = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = rows_[i][enter];
      if (a <= kPivotWeak) continue;
      if (rows_[i][rhs_col_] / a > min_ratio) continue;
      if (bland) {
        if (best == SIZE_MAX || basis_[i] < basis_[best]) best = i;
      } else if (a > best_pivot) {
        best_pivot = a;
        best = i;
      }
    }
    return best;
  }

  void pivot(std::size_t row, std::size_t col) {
    auto& prow = rows_[row];
    const double inv = 1.0 / prow[col];
    for (double& x : prow) x *= inv;
    prow[col] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      auto& r = rows_[i];
      const double f = r[col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= rhs_col_; ++j) r[j] -= f * prow[j];
      r[col] = 0.0;
    }
    basis_[row] = col;
  }

  std::size_t m_, n_, cols_;
  std::size_t art_offset_ = 0, rhs_col_ = 0;
  std::vector<std::size_t> art_rows_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::size_t> basis_;
  bool phase1_ = false;
};

// Exact duplicate constraints contribute nothing and inflate degeneracy
// (index-symmetric inequality systems produce many); drop them up front.
LpProblem deduplicated(const LpProblem& problem) {
  LpProblem out;
  out.num_vars = problem.num_vars;
  out.objective = problem.objective;
  std::map<std::pair<std::vector<double>, double>, bool> seen;
  for (std::size_t i = 0; i < problem.rhs.size(); ++i) {
    auto key = std::make_pair(problem.constraint[i], problem.rhs[i]);
    if (seen.emplace(std::move(key), true).second) {
      out.constraint.push_back(problem.constraint[i]);
      out.rhs.push_back(problem.rhs[i]);
    }
  }
  return out;
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  if (problem.constraint.size() != problem.rhs.size()) {
    throw std::invalid_argument("solve_lp: constraint/rhs size mismatch");
  }
  for (const auto& row : problem.constraint) {
    if (row.size() != problem.num_vars) {
      throw std::invalid_argument("solve_lp: constraint row width mismatch");
    }
  }
  if (!problem.objective.empty() && problem.objective.size() != problem.num_vars) {
    throw std::invalid_argument("solve_lp: objective size mismatch");
  }

  const LpProblem reduced = deduplicated(problem);
  Tableau tab(reduced);
  LpSolution sol;

  if (tab.has_artificials()) {
    tab.load_phase1_objective();
    if (!tab.optimize()) {
      throw LpFailure("simplex: phase 1 reported unbounded, which cannot happen");
    }
    if (tab.objective_value() > 1e-6) {
      // The phase-1 maximum is bounded above by zero; anything visibly
      // positive means the tableau lost numerical integrity.
      throw LpFailure("simplex: numerical breakdown in phase 1 (objective " +
                      std::to_string(tab.objective_value()) + " > 0)");
    }
    if (tab.objective_value() < -kFeasEps) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    tab.drive_out_artificials();
  }

  if (reduced.objective.empty()) {
    sol.status = LpStatus::optimal;
    sol.objective = 0.0;
    sol.x = tab.extract(reduced.num_vars);
    return sol;
  }

  tab.load_phase2_objective(reduced.objective);
  if (!tab.optimize()) {
    sol.status = LpStatus::unbounded;
    return sol;
  }
  sol.status = LpStatus::optimal;
  sol.objective = tab.objective_value();
  sol.x = tab.extract(reduced.num_vars);
  return sol;
}

}  // namespace diagstab
