#include "diagstab/analyzer.hpp"

#include <stdexcept>

#include "diagstab/errors.hpp"

namespace diagstab {

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::T2: return "T2";
    case TheoremId::T3: return "T3";
    case TheoremId::T4: return "T4";
    case TheoremId::T5: return "T5";
    case TheoremId::T6: return "T6";
    case TheoremId::T7: return "T7";
    case TheoremId::P4: return "P4";
    case TheoremId::T9: return "T9";
    case TheoremId::T10: return "T10";
    case TheoremId::T11: return "T11";
    case TheoremId::T12: return "T12";
  }
  return "?";
}

std::string to_string(TheoremStatus status) {
  switch (status) {
    case TheoremStatus::holds: return "holds";
    case TheoremStatus::fails: return "fails";
    case TheoremStatus::inapplicable: return "inapplicable";
  }
  return "?";
}

namespace {

TheoremOutcome inapplicable(TheoremId id, const std::string& reason) {
  TheoremOutcome out;
  out.id = id;
  out.status = TheoremStatus::inapplicable;
  out.note = reason;
  return out;
}

}  // namespace

TheoremOutcome check_theorem2(const SwitchedDelaySystem& sys) {
  if (!sys.single_delay_structure()) {
    return inapplicable(TheoremId::T2, "requires a single delay block per mode");
  }
  TheoremOutcome out;
  out.id = TheoremId::T2;
  auto d = feasible_scaled(m1_set(sys), 1.0, true);
  auto theta = feasible_scaled(m2_set(sys), 1.0, true);
  if (d && theta) {
    out.status = TheoremStatus::holds;
    out.numbers["slack_d"] = d->slack;
    out.numbers["slack_theta"] = theta->slack;
    out.d_witness = std::move(d);
    out.theta_witness = std::move(theta);
  } else {
    out.status = TheoremStatus::fails;
    out.note = d ? "theta system infeasible at scaling one"
                 : (theta ? "d system infeasible at scaling one"
                          : "both systems infeasible at scaling one");
  }
  return out;
}

TheoremOutcome check_theorem4(const SwitchedDelaySystem& sys, double tol) {
  if (!sys.single_delay_structure()) {
    return inapplicable(TheoremId::T4, "requires a single delay block per mode");
  }
  TheoremOutcome out;
  out.id = TheoremId::T4;
  auto [mu, d] = minimal_scaling(m1_set(sys), tol);
  auto [lambda, theta] = minimal_scaling(m2_set(sys), tol);
  const double product = mu * lambda;
  out.numbers["mu"] = mu;
  out.numbers["lambda"] = lambda;
  out.numbers["product"] = product;
  out.status = product < 1.0 - tol ? TheoremStatus::holds : TheoremStatus::fails;
  out.d_witness = std::move(d);
  out.theta_witness = std::move(theta);
  return out;
}

SpectralAnalysis spectral_report(const SwitchedDelaySystem& sys, double tol) {
  if (!sys.single_delay_structure()) {
    throw std::invalid_argument("spectral_report: requires a single delay block per mode");
  }
  SpectralAnalysis analysis;
  analysis.m1_report = row_selection_report(m1_set(sys));
  analysis.m2_report = row_selection_report(m2_set(sys));
  const double rho1 = analysis.m1_report.rho_max;
  const double rho2 = analysis.m2_report.rho_max;

  analysis.t3.id = TheoremId::T3;
  analysis.t3.status = (rho1 < 1.0 - tol && rho2 < 1.0 - tol) ? TheoremStatus::holds
                                                              : TheoremStatus::fails;
  analysis.t3.numbers["rho1"] = rho1;
  analysis.t3.numbers["rho2"] = rho2;

  analysis.t5.id = TheoremId::T5;
  analysis.t5.status = rho1 * rho2 < 1.0 - tol ? TheoremStatus::holds : TheoremStatus::fails;
  analysis.t5.numbers["rho1"] = rho1;
  analysis.t5.numbers["rho2"] = rho2;
  analysis.t5.numbers["product"] = rho1 * rho2;
  return analysis;
}

TheoremOutcome check_theorem6(const SwitchedDelaySystem& sys, double tol) {
  TheoremOutcome out;
  out.id = TheoremId::T6;
  MatrixSet m1 = m1_set_multidelay(sys);
  MatrixSet m2 = m2_set_multidelay(sys);
  auto [mu, d] = minimal_scaling(m1, tol);
  auto [lambda, theta] = minimal_scaling(m2, tol);
  const double product = mu * lambda;
  out.numbers["mu"] = mu;
  out.numbers["lambda"] = lambda;
  out.numbers["product"] = product;
  out.status = product < 1.0 - tol ? TheoremStatus::holds : TheoremStatus::fails;
  out.d_witness = std::move(d);
  out.theta_witness = std::move(theta);
  if (sys.delay() > 1) out.note = "extended construction (multi-delay)";
  return out;
}

TheoremOutcome check_theorem7(const SwitchedDelaySystem& sys, double tol) {
  if (!sys.single_delay_structure()) {
    return inapplicable(TheoremId::T7, "requires a single delay block per mode");
  }
  TheoremOutcome out;
  out.id = TheoremId::T7;
  auto [lambda, theta] = minimal_scaling(m2_set(sys), tol);
  auto [mu, coupled] = minimal_coupled_scaling(sys, CoupledVariant::theorem7, tol);
  const double product = lambda * mu;
  out.numbers["mu"] = mu;
  out.numbers["lambda"] = lambda;
  out.numbers["product"] = product;
  out.status = product < 1.0 - tol ? TheoremStatus::holds : TheoremStatus::fails;
  out.theta_witness = std::move(theta);
  out.coupled_witness = std::move(coupled);
  return out;
}

TheoremOutcome check_prop4(const SwitchedDelaySystem& sys, double tol) {
  if (sys.delay() != 1) {
    return inapplicable(TheoremId::P4, "requires delay one");
  }
  TheoremOutcome out;
  out.id = TheoremId::P4;
  auto [lambda, theta] = minimal_scaling(m2_set(sys), tol);
  auto [mu, coupled] = minimal_coupled_scaling(sys, CoupledVariant::prop4, tol);
  const double product = lambda * mu;
  out.numbers["mu"] = mu;
  out.numbers["lambda"] = lambda;
  out.numbers["product"] = product;
  out.status = product < 1.0 - tol ? TheoremStatus::holds : TheoremStatus::fails;
  out.theta_witness = std::move(theta);
  out.coupled_witness = std::move(coupled);
  return out;
}

namespace {

bool holds(const TheoremOutcome& out) { return out.status == TheoremStatus::holds; }

TheoremOutcome retag(const TheoremOutcome& base, TheoremId id, const std::string& note) {
  TheoremOutcome out = base;
  out.id = id;
  out.note = note;
  return out;
}

}  // namespace

AnalysisReport analyze_all(const SwitchedDelaySystem& sys, double tol) {
  AnalysisReport report;
  report.system_name = sys.name;
  report.n = sys.dim();
  report.num_modes = sys.num_modes();
  report.delay = sys.delay();
  report.model = sys.model_kind();
  report.tol = tol;

  const bool single = sys.single_delay_structure();

  report.outcomes.push_back(single ? check_theorem2(sys)
                                   : inapplicable(TheoremId::T2, "multi-delay system"));

  if (single) {
    try {
      SpectralAnalysis spectral = spectral_report(sys, tol);
      report.outcomes.push_back(std::move(spectral.t3));
      report.outcomes.push_back(check_theorem4(sys, tol));
      report.outcomes.push_back(std::move(spectral.t5));
    } catch (const EnumerationCapError& e) {
      report.outcomes.push_back(inapplicable(TheoremId::T3, e.what()));
      report.outcomes.push_back(check_theorem4(sys, tol));
      report.outcomes.push_back(inapplicable(TheoremId::T5, e.what()));
    }
  } else {
    report.outcomes.push_back(inapplicable(TheoremId::T3, "multi-delay system"));
    report.outcomes.push_back(inapplicable(TheoremId::T4, "multi-delay system"));
    report.outcomes.push_back(inapplicable(TheoremId::T5, "multi-delay system"));
  }

  try {
    report.outcomes.push_back(check_theorem6(sys, tol));
  } catch (const EnumerationCapError& e) {
    report.outcomes.push_back(inapplicable(TheoremId::T6, e.what()));
  }

  report.outcomes.push_back(single ? check_theorem7(sys, tol)
                                   : inapplicable(TheoremId::T7, "multi-delay system"));
  report.outcomes.push_back(check_prop4(sys, tol));

  auto find = [&](TheoremId id) -> const TheoremOutcome& {
    for (const auto& out : report.outcomes)
      if (out.id == id) return out;
    throw std::logic_error("analyze_all: outcome missing");
  };

  // Copies, not references: the re-tag push_backs below may reallocate the
  // outcomes vector.
  const TheoremOutcome t4 = find(TheoremId::T4);
  const TheoremOutcome t7 = find(TheoremId::T7);

  if (sys.model_kind() == ModelKind::filter) {
    report.outcomes.push_back(
        retag(t4, TheoremId::T9, "common functional, quadratic terms on delayed states"));
    report.outcomes.push_back(
        retag(t7, TheoremId::T10, "switched functional, quadratic terms on delayed states"));
  } else if (sys.model_kind() == ModelKind::network) {
    report.outcomes.push_back(retag(
        t4, TheoremId::T11, "ultimate boundedness; requires a radially unbounded nonlinearity"));
    report.outcomes.push_back(retag(
        t7, TheoremId::T12, "ultimate boundedness; requires a radially unbounded nonlinearity"));
  }

  const bool common_holds = holds(find(TheoremId::T2)) || holds(t4) || holds(find(TheoremId::T6));
  const bool switched_holds = holds(t7) || holds(find(TheoremId::P4));
  if (sys.model_kind() == ModelKind::network) {
    report.strongest_conclusion =
        (common_holds || switched_holds) ? kConclusionUltimate : kConclusionUndecided;
  } else if (common_holds) {
    report.strongest_conclusion = kConclusionCommon;
  } else if (switched_holds) {
    report.strongest_conclusion = kConclusionSwitched;
  } else {
    report.strongest_conclusion = kConclusionUndecided;
  }
  return report;
}

}  // namespace diagstab
