#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diagstab/feasibility.hpp"
#include "diagstab/system.hpp"

namespace diagstab {

enum class TheoremId { T2, T3, T4, T5, T6, T7, P4, T9, T10, T11, T12 };
enum class TheoremStatus { holds, fails, inapplicable };

std::string to_string(TheoremId id);
std::string to_string(TheoremStatus status);

/// One checker verdict: status, the scalars it was decided on, and the
/// witnesses backing a "holds" (re-verifiable by construction).
struct TheoremOutcome {
  TheoremId id = TheoremId::T2;
  TheoremStatus status = TheoremStatus::inapplicable;
  std::map<std::string, double> numbers;
  std::optional<ScalingWitness> d_witness;      // common-vector d systems
  std::optional<ScalingWitness> theta_witness;  // per-mode theta systems
  std::optional<CoupledWitness> coupled_witness;
  std::string note;
};

struct SpectralAnalysis {
  TheoremOutcome t3;
  TheoremOutcome t5;
  SelectionReport m1_report;
  SelectionReport m2_report;
};

struct AnalysisReport {
  std::string system_name;
  std::size_t n = 0, num_modes = 0, delay = 0;
  ModelKind model = ModelKind::persidskii;
  double tol = 1e-9;
  std::vector<TheoremOutcome> outcomes;
  std::string strongest_conclusion;
};

/// Strict feasibility of both scaling-one systems: (A_s+B_r)^T d << d and
/// (A_s+B_s) theta << theta.
TheoremOutcome check_theorem2(const SwitchedDelaySystem& sys);

/// Minimal scalings mu* (pair set, transposed) and lambda* (per-mode sums);
/// holds iff mu* * lambda* < 1 - tol. The minima are independent, so the
/// product test at the minima is exact.
TheoremOutcome check_theorem4(const SwitchedDelaySystem& sys, double tol);

/// Row-selection spectral maxima rho1, rho2 and the derived verdicts:
/// both below one, and product below one.
SpectralAnalysis spectral_report(const SwitchedDelaySystem& sys, double tol = 1e-9);

/// Multi-delay product test over all N^(l+1) transposed sums (strict mode).
TheoremOutcome check_theorem6(const SwitchedDelaySystem& sys, double tol);

/// Coupled d-family system over (s,r,m,j) plus the per-mode theta system.
TheoremOutcome check_theorem7(const SwitchedDelaySystem& sys, double tol);

/// Coupled d-family system over (s,r,j); requires delay one.
TheoremOutcome check_prop4(const SwitchedDelaySystem& sys, double tol);

/// Runs every applicable checker, re-tags conclusions for the filter and
/// network model kinds, and fills the strongest conclusion.
AnalysisReport analyze_all(const SwitchedDelaySystem& sys, double tol = 1e-9);

inline const char* kConclusionCommon = "diagonally stable via common functional";
inline const char* kConclusionSwitched = "diagonally stable via switched functional";
inline const char* kConclusionUltimate = "ultimate boundedness only";
inline const char* kConclusionUndecided = "undecided";

}  // namespace diagstab
