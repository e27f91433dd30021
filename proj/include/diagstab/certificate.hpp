#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "diagstab/linalg.hpp"
#include "diagstab/system.hpp"

namespace diagstab {

/// Which functional shape a certificate instantiates. The wire tokens (eq5,
/// eq12, eq15, eq18, eq19) are the document-format identifiers.
enum class FunctionalForm {
  common_nonlinear,    // "eq5":  x'Px + sum_m f(x(k-m))' Q_m f(x(k-m))
  switched_nonlinear,  // "eq12": mode-indexed P, common Q_m on f
  switched_pq,         // "eq15": mode-indexed P and Q, delay one, on f
  common_state,        // "eq18": x'Px + sum_m x(k-m)' Q_m x(k-m)
  switched_state,      // "eq19": mode-indexed P, common Q_m on x
};

std::string to_string(FunctionalForm form);
FunctionalForm functional_form_from_string(const std::string& s);
bool form_applies_to_states(FunctionalForm form);
bool form_is_switched(FunctionalForm form);

/// Common diagonal certificate: P = diag(d_i/theta_i), Q from
/// Q*theta = lambda*eta + delta*e, and the delay cascade
/// Q_m = Q + (l-m+1)*epsilon*I.
struct CommonDiagonalCertificate {
  DenseVector p_diag;
  DenseVector q_diag;
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t delay = 1;
  FunctionalForm form = FunctionalForm::common_nonlinear;
  // Generating witness, retained so the certificate re-verifies standalone.
  DenseVector d;
  DenseVector theta;
  double mu = 0.0;
  double lambda = 0.0;
  bool extended_construction = false;  // multi-delay collapse of the delay blocks
};

/// Switched certificate: P^(s) = diag(d^(s)_i/theta_i) with a common Q-tilde.
struct SwitchedDiagonalCertificate {
  std::vector<DenseVector> p_diags;
  DenseVector q_tilde_diag;
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t delay = 1;
  FunctionalForm form = FunctionalForm::switched_nonlinear;
  std::vector<DenseVector> d_family;
  DenseVector theta;
  double mu = 0.0;
  double lambda = 0.0;
};

/// Delay-one switched certificate with per-mode Q^(s).
struct SwitchedL1Certificate {
  std::vector<DenseVector> p_diags;
  std::vector<DenseVector> q_diags;
  double delta = 0.0;
  FunctionalForm form = FunctionalForm::switched_pq;
  std::vector<DenseVector> d_family;
  DenseVector theta;
  double mu = 0.0;
  double lambda = 0.0;
};

using Certificate =
    std::variant<CommonDiagonalCertificate, SwitchedDiagonalCertificate, SwitchedL1Certificate>;

std::size_t certificate_delay(const Certificate& cert);
FunctionalForm certificate_form(const Certificate& cert);

struct IndexMargin {
  std::size_t s = 0;
  std::size_t r = 0;  // equals s for common certificates
  double largest_eigenvalue = 0.0;
  bool metzler_ok = false;
};

/// Per-index block-matrix margins plus the guaranteed decrease coefficient
/// beta derived from the worst margin and epsilon.
struct VerificationReport {
  std::vector<IndexMargin> margins;
  double beta = 0.0;
  bool accepted = false;
  double worst_margin = 0.0;
};

/// Builds P = diag(d/theta), eta as the componentwise max of B_r^T d,
/// delta = (1 - lambda*mu)/2 * min_i d_i and Q*theta = lambda*eta + delta*e.
/// The witness is re-verified against the inequality systems before use;
/// throws WitnessError on violation or when lambda*mu >= 1.
CommonDiagonalCertificate synthesize_common(const SwitchedDelaySystem& sys, const DenseVector& d,
                                            const DenseVector& theta, double mu, double lambda);

/// Switched analogue with Q~*theta = lambda*max_{s,m} B_s^T d^(m) + delta*e.
SwitchedDiagonalCertificate synthesize_switched(const SwitchedDelaySystem& sys,
                                                const std::vector<DenseVector>& d_family,
                                                const DenseVector& theta, double mu,
                                                double lambda);

/// Delay-one variant with per-mode Q^(s)*theta = lambda*max_m B_s^T d^(m) + delta*e.
SwitchedL1Certificate synthesize_switched_l1(const SwitchedDelaySystem& sys,
                                             const std::vector<DenseVector>& d_family,
                                             const DenseVector& theta, double mu, double lambda);

/// The symmetric 2n x 2n quadratic-form block matrix
///   [ A'PA - P + Q   A'PB ]
///   [ B'PA           B'PB - Q ]
/// with the certificate-appropriate P and Q blocks; r_opt selects the
/// target-mode P^(r) for switched certificates.
DenseMatrix build_block_matrix(const SwitchedDelaySystem& sys, const Certificate& cert,
                               std::size_t s, std::optional<std::size_t> r_opt = std::nullopt);

/// Runs both negativity routes (symmetric eigenvalue and the Metzler witness
/// with w = (theta; theta)) on every required block matrix. Failures are
/// report content, not exceptions.
VerificationReport verify_certificate(const SwitchedDelaySystem& sys, const Certificate& cert);

/// Evaluates the certified functional on a history (newest first:
/// x(k), x(k-1), ..., x(k-l)) with active mode sigma (0-based; ignored by
/// common certificates).
double evaluate_functional(const Certificate& cert, const std::vector<DenseVector>& history,
                           std::size_t sigma, const std::function<double(double)>& f);

}  // namespace diagstab
