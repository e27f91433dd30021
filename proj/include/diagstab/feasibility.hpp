#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "diagstab/linalg.hpp"
#include "diagstab/system.hpp"

namespace diagstab {

/// Non-empty family of nonnegative square matrices of one dimension.
class MatrixSet {
 public:
  explicit MatrixSet(std::vector<DenseMatrix> members);
  const std::vector<DenseMatrix>& members() const { return members_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return members_.size(); }

 private:
  std::vector<DenseMatrix> members_;
  std::size_t dim_;
};

/// The two matrix families attached to a single-delay system:
///   m1: all (A_s + B_r)^T over mode pairs, m2: the per-mode sums A_s + B_s.
MatrixSet m1_set(const SwitchedDelaySystem& sys);
MatrixSet m2_set(const SwitchedDelaySystem& sys);
/// Multi-delay analogues: all (A_s + B_{1,r1} + ... + B_{l,rl})^T over the
/// N^(l+1) index combinations, and the per-mode summed blocks.
MatrixSet m1_set_multidelay(const SwitchedDelaySystem& sys, std::size_t combination_cap = 1000000);
MatrixSet m2_set_multidelay(const SwitchedDelaySystem& sys);

/// Strictly positive vector v with (Av)_i <= lambda*v_i - slack for every
/// member A; produced by the maximal-slack LP, normalized to min entry 1.
struct ScalingWitness {
  double lambda = 0.0;
  DenseVector v;
  double slack = 0.0;
};

/// Row selection: entry i names the member supplying row i.
using RowSelection = std::vector<std::size_t>;

struct SelectionReport {
  double rho_max = 0.0;
  RowSelection argmax;
  std::size_t count = 0;
};

/// Positive vector family d^(1)..d^(N) solving a coupled inequality system at
/// scaling mu with the stated entrywise slack.
struct CoupledWitness {
  double mu = 0.0;
  std::vector<DenseVector> d_family;
  double slack = 0.0;
};

enum class CoupledVariant {
  /// A_s^T d^(r) + B_m^T d^(j) <= mu d^(s) over all (s,r,m,j)
  theorem7,
  /// A_s^T d^(r) + B_r^T d^(j) <= mu d^(s) over all (s,r,j)
  prop4,
};

/// Smallest margin of the scaling system at (lambda, v): min over members and
/// rows of lambda*v_i - (Av)_i. Negative means the witness is invalid.
double scaling_slack(const MatrixSet& m, double lambda, const DenseVector& v);

/// Smallest margin of the coupled system at (mu, d_family).
double coupled_slack(const SwitchedDelaySystem& sys, CoupledVariant variant, double mu,
                     const std::vector<DenseVector>& d_family);

/// Decides whether some v >> 0 satisfies Av <= lambda*v for every member
/// (strict: Av << lambda*v), returning the maximal-slack witness when
/// feasible. LP encoding: variables v in [1, 1e6] and slack t >= 0,
/// constraints (Av)_i - lambda*v_i + t <= 0, objective max t; strict
/// feasibility means optimal t > 1e-9.
std::optional<ScalingWitness> feasible_scaled(const MatrixSet& m, double lambda, bool strict);

/// Bisects [0, 1 + max row sum] for the smallest strictly feasible scaling;
/// the returned witness is feasible at the returned lambda.
std::pair<double, ScalingWitness> minimal_scaling(const MatrixSet& m, double tol);

/// Exhaustive row-selection enumeration (|members|^n selections, capped at
/// 10^6): maximum spectral radius and the lexicographically first selection
/// attaining it within tie_tol.
SelectionReport row_selection_report(const MatrixSet& m, double tol = 1e-10,
                                     std::size_t cap = 1000000);

/// Coupled feasibility at scaling mu for a single-delay system; one LP over
/// the stacked d-family, same box/slack encoding as feasible_scaled.
std::optional<CoupledWitness> feasible_coupled(const SwitchedDelaySystem& sys, double mu,
                                               CoupledVariant variant, bool strict);

/// Bisection wrapper around feasible_coupled (monotone in mu).
std::pair<double, CoupledWitness> minimal_coupled_scaling(const SwitchedDelaySystem& sys,
                                                          CoupledVariant variant, double tol);

}  // namespace diagstab
