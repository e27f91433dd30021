#include "diagstab/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "diagstab/errors.hpp"
#include "diagstab/simplex.hpp"

namespace diagstab {

namespace {

constexpr double kBoxUpper = 1e6;      // normalization 1 <= v_i <= 1e6
constexpr double kStrictSlack = 1e-9;  // strict feasibility threshold on the LP slack

void rescale_to_min_one(DenseVector& v) {
  const double lo = *std::min_element(v.begin(), v.end());
  for (double& x : v) x /= lo;
}

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap, const char* who) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (total > cap / base) {
      throw EnumerationCapError(std::string(who) + ": " + std::to_string(base) + "^" +
                                    std::to_string(exp) + " selections exceed cap " +
                                    std::to_string(cap),
                                cap, 0);
    }
    total *= base;
  }
  return total;
}

// Advances a mixed-radix odometer (last position fastest); false on wrap.
bool advance(std::vector<std::size_t>& idx, std::size_t radix) {
  std::size_t pos = idx.size();
  while (pos > 0) {
    if (++idx[pos - 1] < radix) return true;
    idx[pos - 1] = 0;
    --pos;
  }
  return false;
}

}  // namespace

MatrixSet::MatrixSet(std::vector<DenseMatrix> members) : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("MatrixSet: empty family");
  dim_ = members_.front().rows();
  for (const auto& m : members_) {
    if (!m.square() || m.rows() != dim_) {
      throw std::invalid_argument("MatrixSet: members must be square with uniform dimension");
    }
    if (!is_nonnegative(m)) {
      throw std::invalid_argument("MatrixSet: members must be entrywise nonnegative");
    }
  }
}

MatrixSet m1_set(const SwitchedDelaySystem& sys) {
  if (!sys.single_delay_structure()) {
    throw std::invalid_argument("m1_set: system must have a single delay block per mode");
  }
  std::vector<DenseMatrix> members;
  members.reserve(sys.num_modes() * sys.num_modes());
  for (std::size_t s = 0; s < sys.num_modes(); ++s)
    for (std::size_t r = 0; r < sys.num_modes(); ++r)
      members.push_back(transpose(sys.a(s) + sys.b_last(r)));
  return MatrixSet(std::move(members));
}

MatrixSet m2_set(const SwitchedDelaySystem& sys) {
  if (!sys.single_delay_structure()) {
    throw std::invalid_argument("m2_set: system must have a single delay block per mode");
  }
  std::vector<DenseMatrix> members;
  members.reserve(sys.num_modes());
  for (std::size_t s = 0; s < sys.num_modes(); ++s) members.push_back(sys.a(s) + sys.b_last(s));
  return MatrixSet(std::move(members));
}

MatrixSet m1_set_multidelay(const SwitchedDelaySystem& sys, std::size_t combination_cap) {
  const std::size_t modes = sys.num_modes();
  const std::size_t l = sys.delay();
  checked_power(modes, l + 1, combination_cap, "m1_set_multidelay");
  std::vector<DenseMatrix> members;
  std::vector<std::size_t> idx(l + 1, 0);  // (s, r_1, ..., r_l)
  do {
    DenseMatrix sum = sys.a(idx[0]);
    for (std::size_t m = 0; m < l; ++m) sum = sum + sys.b(m, idx[m + 1]);
    members.push_back(transpose(sum));
  } while (advance(idx, modes));
  return MatrixSet(std::move(members));
}

MatrixSet m2_set_multidelay(const SwitchedDelaySystem& sys) {
  std::vector<DenseMatrix> members;
  for (std::size_t s = 0; s < sys.num_modes(); ++s) {
    members.push_back(sys.a(s) + sys.summed_delay_blocks(s));
  }
  return MatrixSet(std::move(members));
}

double scaling_slack(const MatrixSet& m, double lambda, const DenseVector& v) {
  if (v.size() != m.dim()) throw std::invalid_argument("scaling_slack: dimension mismatch");
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& a : m.members()) {
    const DenseVector av = mat_vec(a, v);
    for (std::size_t i = 0; i < v.size(); ++i) slack = std::min(slack, lambda * v[i] - av[i]);
  }
  return slack;
}

namespace {

// LP for the scaling system: variables w = v - e (so the box 1 <= v <= 1e6
// becomes 0 <= w <= 1e6 - 1), plus the slack t as last variable when the
// maximal slack is wanted; fixed_slack pins t instead for pure probes.
LpProblem scaling_lp(const MatrixSet& m, double lambda, double fixed_slack, bool with_objective) {
  const std::size_t n = m.dim();
  LpProblem lp;
  lp.num_vars = n + (with_objective ? 1 : 0);
  for (const auto& a : m.members()) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(lp.num_vars, 0.0);
      double rhs = lambda - fixed_slack;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] += a(i, j);
        rhs -= a(i, j);
      }
      row[i] -= lambda;
      if (with_objective) row[n] = 1.0;
      lp.constraint.push_back(std::move(row));
      lp.rhs.push_back(rhs);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(lp.num_vars, 0.0);
    row[i] = 1.0;
    lp.constraint.push_back(std::move(row));
    lp.rhs.push_back(kBoxUpper - 1.0);
  }
  if (with_objective) {
    lp.objective.assign(lp.num_vars, 0.0);
    lp.objective[n] = 1.0;
  }
  return lp;
}

// Phase-1-only probe used inside bisection: is the system solvable with the
// slack pinned at the strictness threshold? LP breakdown can only happen on
// the knife edge where the pinned-slack polytope is thinner than the
// tolerance, so it is answered as infeasible; the bisection result stays a
// proven-feasible endpoint and witnesses are re-verified entrywise anyway.
bool strictly_feasible_probe(const MatrixSet& m, double lambda) {
  try {
    return solve_lp(scaling_lp(m, lambda, kStrictSlack, false)).status == LpStatus::optimal;
  } catch (const LpFailure&) {
    return false;
  }
}

}  // namespace

std::optional<ScalingWitness> feasible_scaled(const MatrixSet& m, double lambda, bool strict) {
  const LpSolution sol = solve_lp(scaling_lp(m, lambda, 0.0, true));
  if (sol.status == LpStatus::unbounded) {
    throw LpFailure("feasible_scaled: LP unbounded despite box normalization");
  }
  if (sol.status == LpStatus::infeasible) return std::nullopt;
  if (strict && !(sol.objective > kStrictSlack)) return std::nullopt;

  ScalingWitness w;
  w.lambda = lambda;
  w.v.assign(m.dim(), 0.0);
  for (std::size_t i = 0; i < m.dim(); ++i) w.v[i] = 1.0 + sol.x[i];
  rescale_to_min_one(w.v);
  w.slack = std::max(0.0, scaling_slack(m, lambda, w.v));
  return w;
}

std::pair<double, ScalingWitness> minimal_scaling(const MatrixSet& m, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("minimal_scaling: tol must be positive");
  double lo = 0.0;
  double hi = 1.0;
  for (const auto& a : m.members()) hi = std::max(hi, 1.0 + max_row_sum(a));
  if (!strictly_feasible_probe(m, hi)) {
    throw LpFailure("minimal_scaling: bracket endpoint unexpectedly infeasible");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (strictly_feasible_probe(m, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // The max-slack optimum can sit a hair below the fixed-slack probe's
  // answer (or the LP can break down on the knife edge); nudge once by the
  // tolerance before giving up.
  std::optional<ScalingWitness> witness;
  try {
    witness = feasible_scaled(m, hi, true);
  } catch (const LpFailure&) {
  }
  if (witness) return {hi, *witness};
  witness = feasible_scaled(m, hi + tol, true);
  if (!witness) throw LpFailure("minimal_scaling: witness extraction failed at bracket end");
  witness->lambda = hi + tol;
  return {hi + tol, *witness};
}

SelectionReport row_selection_report(const MatrixSet& m, double tol, std::size_t cap) {
  const std::size_t n = m.dim();
  const std::size_t members = m.size();
  const std::size_t total = checked_power(members, n, cap, "row_selection_report");

  SelectionReport report;
  report.count = total;

  std::vector<double> rho(total, 0.0);
  RowSelection sel(n, 0);
  DenseMatrix assembled(n, n);
  std::size_t ordinal = 0;
  do {
    for (std::size_t i = 0; i < n; ++i) {
      const DenseMatrix& src = m.members()[sel[i]];
      for (std::size_t j = 0; j < n; ++j) assembled(i, j) = src(i, j);
    }
    rho[ordinal++] = spectral_radius(assembled, tol);
  } while (advance(sel, members));

  const double best = *std::max_element(rho.begin(), rho.end());
  std::size_t arg = 0;
  while (rho[arg] < best - tol) ++arg;
  report.rho_max = rho[arg];

  report.argmax.assign(n, 0);
  std::size_t rem = arg;
  for (std::size_t i = n; i > 0; --i) {
    report.argmax[i - 1] = rem % members;
    rem /= members;
  }
  return report;
}

namespace {

void check_coupled_preconditions(const SwitchedDelaySystem& sys) {
  if (!sys.single_delay_structure()) {
    throw std::invalid_argument("coupled system: one delay block per mode required");
  }
}

// Enumerates the coupled system's index tuples: (s, r, m, j) with the B index
// m free for theorem7 and tied to r for prop4.
template <typename Fn>
void for_each_coupled_constraint(std::size_t modes, CoupledVariant variant, Fn&& fn) {
  for (std::size_t s = 0; s < modes; ++s) {
    for (std::size_t r = 0; r < modes; ++r) {
      for (std::size_t j = 0; j < modes; ++j) {
        if (variant == CoupledVariant::theorem7) {
          for (std::size_t mm = 0; mm < modes; ++mm) fn(s, r, mm, j);
        } else {
          fn(s, r, r, j);
        }
      }
    }
  }
}

}  // namespace

double coupled_slack(const SwitchedDelaySystem& sys, CoupledVariant variant, double mu,
                     const std::vector<DenseVector>& d_family) {
  check_coupled_preconditions(sys);
  if (d_family.size() != sys.num_modes()) {
    throw std::invalid_argument("coupled_slack: need one vector per mode");
  }
  for (const auto& d : d_family) {
    if (d.size() != sys.dim()) throw std::invalid_argument("coupled_slack: dimension mismatch");
  }
  const std::size_t n = sys.dim();
  std::vector<DenseMatrix> a_t, b_t;
  for (std::size_t s = 0; s < sys.num_modes(); ++s) {
    a_t.push_back(transpose(sys.a(s)));
    b_t.push_back(transpose(sys.b_last(s)));
  }
  double slack = std::numeric_limits<double>::infinity();
  for_each_coupled_constraint(
      sys.num_modes(), variant, [&](std::size_t s, std::size_t r, std::size_t mm, std::size_t j) {
        const DenseVector lhs_a = mat_vec(a_t[s], d_family[r]);
        const DenseVector lhs_b = mat_vec(b_t[mm], d_family[j]);
        for (std::size_t i = 0; i < n; ++i) {
          slack = std::min(slack, mu * d_family[s][i] - lhs_a[i] - lhs_b[i]);
        }
      });
  return slack;
}

namespace {

LpProblem coupled_lp(const SwitchedDelaySystem& sys, double mu, CoupledVariant variant,
                     double fixed_slack, bool with_objective) {
  const std::size_t n = sys.dim();
  const std::size_t modes = sys.num_modes();
  const std::size_t stacked = modes * n;

  std::vector<DenseMatrix> a_t, b_t;
  for (std::size_t s = 0; s < modes; ++s) {
    a_t.push_back(transpose(sys.a(s)));
    b_t.push_back(transpose(sys.b_last(s)));
  }

  LpProblem lp;
  lp.num_vars = stacked + (with_objective ? 1 : 0);
  auto var = [n](std::size_t mode, std::size_t i) { return mode * n + i; };

  for_each_coupled_constraint(
      modes, variant, [&](std::size_t s, std::size_t r, std::size_t mm, std::size_t j) {
        for (std::size_t i = 0; i < n; ++i) {
          std::vector<double> row(lp.num_vars, 0.0);
          double rhs = mu - fixed_slack;
          for (std::size_t k = 0; k < n; ++k) {
            row[var(r, k)] += a_t[s](i, k);
            rhs -= a_t[s](i, k);
            row[var(j, k)] += b_t[mm](i, k);
            rhs -= b_t[mm](i, k);
          }
          row[var(s, i)] -= mu;
          if (with_objective) row[stacked] = 1.0;
          lp.constraint.push_back(std::move(row));
          lp.rhs.push_back(rhs);
        }
      });
  for (std::size_t k = 0; k < stacked; ++k) {
    std::vector<double> row(lp.num_vars, 0.0);
    row[k] = 1.0;
    lp.constraint.push_back(std::move(row));
    lp.rhs.push_back(kBoxUpper - 1.0);
  }
  if (with_objective) {
    lp.objective.assign(lp.num_vars, 0.0);
    lp.objective[stacked] = 1.0;
  }
  return lp;
}

bool coupled_feasible_probe(const SwitchedDelaySystem& sys, double mu, CoupledVariant variant) {
  try {
    return solve_lp(coupled_lp(sys, mu, variant, kStrictSlack, false)).status ==
           LpStatus::optimal;
  } catch (const LpFailure&) {
    return false;  // knife-edge breakdown; see strictly_feasible_probe
  }
}

}  // namespace

std::optional<CoupledWitness> feasible_coupled(const SwitchedDelaySystem& sys, double mu,
                                               CoupledVariant variant, bool strict) {
  check_coupled_preconditions(sys);
  const std::size_t modes = sys.num_modes();
  const std::size_t n = sys.dim();
  const std::size_t tuples = (variant == CoupledVariant::theorem7)
                                 ? modes * modes * modes * modes
                                 : modes * modes * modes;
  if (tuples * n > 1000000) {
    throw EnumerationCapError("feasible_coupled: constraint count exceeds cap", 1000000,
                              tuples * n);
  }

  const LpSolution sol = solve_lp(coupled_lp(sys, mu, variant, 0.0, true));
  if (sol.status == LpStatus::unbounded) {
    throw LpFailure("feasible_coupled: LP unbounded despite box normalization");
  }
  if (sol.status == LpStatus::infeasible) return std::nullopt;
  if (strict && !(sol.objective > kStrictSlack)) return std::nullopt;

  CoupledWitness w;
  w.mu = mu;
  w.d_family.assign(modes, DenseVector(n, 0.0));
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < modes; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      w.d_family[s][i] = 1.0 + sol.x[s * n + i];
      lo = std::min(lo, w.d_family[s][i]);
    }
  }
  for (auto& d : w.d_family) {
    for (double& x : d) x /= lo;
  }
  w.slack = std::max(0.0, coupled_slack(sys, variant, mu, w.d_family));
  return w;
}

std::pair<double, CoupledWitness> minimal_coupled_scaling(const SwitchedDelaySystem& sys,
                                                          CoupledVariant variant, double tol) {
  check_coupled_preconditions(sys);
  if (!(tol > 0.0)) throw std::invalid_argument("minimal_coupled_scaling: tol must be positive");

  // With every d^(s) = e the left sides are column sums, so one plus the
  // largest column-sum pair is strictly feasible.
  double hi = 1.0;
  for (std::size_t s = 0; s < sys.num_modes(); ++s) {
    for (std::size_t mm = 0; mm < sys.num_modes(); ++mm) {
      hi = std::max(hi, 1.0 + max_row_sum(transpose(sys.a(s))) +
                             max_row_sum(transpose(sys.b_last(mm))));
    }
  }
  double lo = 0.0;
  if (!coupled_feasible_probe(sys, hi, variant)) {
    throw LpFailure("minimal_coupled_scaling: bracket endpoint unexpectedly infeasible");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (coupled_feasible_probe(sys, mid, variant)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  std::optional<CoupledWitness> witness;
  try {
    witness = feasible_coupled(sys, hi, variant, true);
  } catch (const LpFailure&) {
  }
  if (witness) return {hi, *witness};
  witness = feasible_coupled(sys, hi + tol, variant, true);
  if (!witness) {
    throw LpFailure("minimal_coupled_scaling: witness extraction failed at bracket end");
  }
  witness->mu = hi + tol;
  return {hi + tol, *witness};
}

}  // namespace diagstab
