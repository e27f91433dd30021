#include "diagstab/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "diagstab/errors.hpp"
#include "diagstab/feasibility.hpp"

namespace diagstab {

std::string to_string(FunctionalForm form) {
  switch (form) {
    case FunctionalForm::common_nonlinear: return "eq5";
    case FunctionalForm::switched_nonlinear: return "eq12";
    case FunctionalForm::switched_pq: return "eq15";
    case FunctionalForm::common_state: return "eq18";
    case FunctionalForm::switched_state: return "eq19";
  }
  return "eq5";
}

FunctionalForm functional_form_from_string(const std::string& s) {
  if (s == "eq5") return FunctionalForm::common_nonlinear;
  if (s == "eq12") return FunctionalForm::switched_nonlinear;
  if (s == "eq15") return FunctionalForm::switched_pq;
  if (s == "eq18") return FunctionalForm::common_state;
  if (s == "eq19") return FunctionalForm::switched_state;
  throw InputError("unknown functional form '" + s + "'");
}

bool form_applies_to_states(FunctionalForm form) {
  return form == FunctionalForm::common_state || form == FunctionalForm::switched_state;
}

bool form_is_switched(FunctionalForm form) {
  return form != FunctionalForm::common_nonlinear && form != FunctionalForm::common_state;
}

std::size_t certificate_delay(const Certificate& cert) {
  return std::visit(
      [](const auto& c) -> std::size_t {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SwitchedL1Certificate>) {
          return 1;
        } else {
          return c.delay;
        }
      },
      cert);
}

FunctionalForm certificate_form(const Certificate& cert) {
  return std::visit([](const auto& c) { return c.form; }, cert);
}

namespace {

constexpr double kReverifyTol = 1e-9;

void require_strictly_positive(const DenseVector& v, const char* label) {
  if (!is_strictly_positive(v)) {
    throw WitnessError(std::string(label) + " must be strictly positive");
  }
}

double witness_scale(const DenseVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return std::max(1.0, m);
}

// Re-verifies the common-vector inequality system (strict tolerance scaled to
// the witness) and the product condition before any construction.
void reverify_common_witness(const SwitchedDelaySystem& sys, const DenseVector& d,
                             const DenseVector& theta, double mu, double lambda) {
  require_strictly_positive(d, "d");
  require_strictly_positive(theta, "theta");
  if (!(mu > 0.0) || !(lambda > 0.0)) throw WitnessError("scalings must be positive");
  if (!(lambda * mu < 1.0)) {
    throw WitnessError("scaling product lambda*mu = " + std::to_string(lambda * mu) +
                       " is not below one");
  }
  const bool multi = !sys.single_delay_structure();
  const MatrixSet m1 = multi ? m1_set_multidelay(sys) : m1_set(sys);
  const MatrixSet m2 = multi ? m2_set_multidelay(sys) : m2_set(sys);
  if (scaling_slack(m1, mu, d) < -kReverifyTol * witness_scale(d)) {
    throw WitnessError("d does not satisfy the pairwise sum system at mu");
  }
  if (scaling_slack(m2, lambda, theta) < -kReverifyTol * witness_scale(theta)) {
    throw WitnessError("theta does not satisfy the per-mode sum system at lambda");
  }
}

DenseVector componentwise_max_transposed(const std::vector<DenseMatrix>& mats,
                                         const DenseVector& d) {
  DenseVector eta(d.size(), 0.0);
  for (const auto& m : mats) {
    const DenseVector md = mat_vec(transpose(m), d);
    for (std::size_t i = 0; i < d.size(); ++i) eta[i] = std::max(eta[i], md[i]);
  }
  return eta;
}

// Collapsed delay block per mode: the single block for single-delay systems,
// the sum of blocks otherwise (extended construction).
std::vector<DenseMatrix> effective_delay_blocks(const SwitchedDelaySystem& sys) {
  std::vector<DenseMatrix> blocks;
  for (std::size_t s = 0; s < sys.num_modes(); ++s) blocks.push_back(sys.summed_delay_blocks(s));
  return blocks;
}

// Symmetric block matrix [[A'PA - P1 + Q1, A'PB], [B'PA, B'PB - Q2]] with
// diagonal P, P1, Q1, Q2; entries are mirrored exactly so the output equals
// its transpose bit for bit.
DenseMatrix assemble_block(const DenseMatrix& a, const DenseMatrix& b, const DenseVector& p,
                           const DenseVector& p_subtract, const DenseVector& q_add,
                           const DenseVector& q_subtract) {
  const std::size_t n = a.rows();
  DenseMatrix block(2 * n, 2 * n, 0.0);
  auto weighted = [&](const DenseMatrix& x, const DenseMatrix& y, std::size_t i, std::size_t j) {
    // (X' P Y)_{ij}
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += x(k, i) * p[k] * y(k, j);
    return sum;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double tl = weighted(a, a, i, j);
      block(i, j) = tl;
      block(j, i) = tl;
      const double br = weighted(b, b, i, j);
      block(n + i, n + j) = br;
      block(n + j, n + i) = br;
    }
    block(i, i) += q_add[i] - p_subtract[i];
    block(n + i, n + i) -= q_subtract[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double tr = weighted(a, b, i, j);
      block(i, n + j) = tr;
      block(n + j, i) = tr;
    }
  }
  return block;
}

struct BlockInputs {
  DenseVector p;           // P inside the products
  DenseVector p_subtract;  // P subtracted in the top-left block
  DenseVector q_add;
  DenseVector q_subtract;
};

BlockInputs block_inputs(const Certificate& cert, std::size_t s, std::size_t r) {
  return std::visit(
      [&](const auto& c) -> BlockInputs {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CommonDiagonalCertificate>) {
          return {c.p_diag, c.p_diag, c.q_diag, c.q_diag};
        } else if constexpr (std::is_same_v<T, SwitchedDiagonalCertificate>) {
          return {c.p_diags.at(r), c.p_diags.at(s), c.q_tilde_diag, c.q_tilde_diag};
        } else {
          return {c.p_diags.at(r), c.p_diags.at(s), c.q_diags.at(r), c.q_diags.at(s)};
        }
      },
      cert);
}

const DenseVector& certificate_theta(const Certificate& cert) {
  return std::visit([](const auto& c) -> const DenseVector& { return c.theta; }, cert);
}

// Worst-margin constant alpha and the resulting epsilon choice
// alpha / (2 l (1 + n)); beta = min(alpha - l*epsilon, epsilon) except for the
// delay-one switched form, which has no epsilon cascade and gets beta = alpha.
double epsilon_from_alpha(double alpha, std::size_t l, std::size_t n) {
  return alpha / (2.0 * static_cast<double>(l) * (1.0 + static_cast<double>(n)));
}

}  // namespace

CommonDiagonalCertificate synthesize_common(const SwitchedDelaySystem& sys, const DenseVector& d,
                                            const DenseVector& theta, double mu, double lambda) {
  if (d.size() != sys.dim() || theta.size() != sys.dim()) {
    throw std::invalid_argument("synthesize_common: witness dimension mismatch");
  }
  reverify_common_witness(sys, d, theta, mu, lambda);

  const std::size_t n = sys.dim();
  CommonDiagonalCertificate cert;
  cert.delay = sys.delay();
  cert.form = sys.model_kind() == ModelKind::filter ? FunctionalForm::common_state
                                                    : FunctionalForm::common_nonlinear;
  cert.d = d;
  cert.theta = theta;
  cert.mu = mu;
  cert.lambda = lambda;
  cert.extended_construction = !sys.single_delay_structure();

  cert.p_diag.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) cert.p_diag[i] = d[i] / theta[i];

  const DenseVector eta = componentwise_max_transposed(effective_delay_blocks(sys), d);
  cert.delta = 0.5 * (1.0 - lambda * mu) * *std::min_element(d.begin(), d.end());
  cert.q_diag.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cert.q_diag[i] = (lambda * eta[i] + cert.delta) / theta[i];
  }

  // Epsilon needs the worst block margin, which needs the finished P and Q.
  double alpha = std::numeric_limits<double>::infinity();
  Certificate wrapped = cert;
  for (std::size_t s = 0; s < sys.num_modes(); ++s) {
    double margin = 0.0;
    is_negative_definite(build_block_matrix(sys, wrapped, s), margin);
    alpha = std::min(alpha, -margin);
  }
  if (!(alpha > 0.0)) {
    throw WitnessError("constructed blocks are not negative definite (product gap too small)");
  }
  cert.epsilon = epsilon_from_alpha(alpha, cert.delay, n);
  return cert;
}

SwitchedDiagonalCertificate synthesize_switched(const SwitchedDelaySystem& sys,
                                                const std::vector<DenseVector>& d_family,
                                                const DenseVector& theta, double mu,
                                                double lambda) {
  if (!sys.single_delay_structure()) {
    throw std::invalid_argument("synthesize_switched: single delay block per mode required");
  }
  if (d_family.size() != sys.num_modes()) {
    throw std::invalid_argument("synthesize_switched: need one d vector per mode");
  }
  const std::size_t n = sys.dim();
  for (const auto& d : d_family) require_strictly_positive(d, "d family");
  require_strictly_positive(theta, "theta");
  if (!(lambda * mu < 1.0)) {
    throw WitnessError("scaling product lambda*mu = " + std::to_string(lambda * mu) +
                       " is not below one");
  }
  double scale = 1.0;
  for (const auto& d : d_family) scale = std::max(scale, witness_scale(d));
  if (coupled_slack(sys, CoupledVariant::theorem7, mu, d_family) < -kReverifyTol * scale) {
    throw WitnessError("d family does not satisfy the coupled system at mu");
  }
  if (scaling_slack(m2_set(sys), lambda, theta) < -kReverifyTol * witness_scale(theta)) {
    throw WitnessError("theta does not satisfy the per-mode sum system at lambda");
  }

  SwitchedDiagonalCertificate cert;
  cert.delay = sys.delay();
  cert.form = sys.model_kind() == ModelKind::filter ? FunctionalForm::switched_state
                                                    : FunctionalForm::switched_nonlinear;
  cert.d_family = d_family;
  cert.theta = theta;
  cert.mu = mu;
  cert.lambda = lambda;

  cert.p_diags.assign(sys.num_modes(), DenseVector(n, 0.0));
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sys.num_modes(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      cert.p_diags[s][i] = d_family[s][i] / theta[i];
      min_d = std::min(min_d, d_family[s][i]);
    }
  }
  cert.delta = 0.5 * (1.0 - lambda * mu) * min_d;

  // Q~ theta = lambda * max over (s, m) of B_s^T d^(m) + delta e.
  DenseVector eta(n, 0.0);
  for (std::size_t s = 0; s < sys.num_modes(); ++s) {
    const DenseMatrix bt = transpose(sys.b_last(s));
    for (std::size_t m = 0; m < sys.num_modes(); ++m) {
      const DenseVector bd = mat_vec(bt, d_family[m]);
      for (std::size_t i = 0; i < n; ++i) eta[i] = std::max(eta[i], bd[i]);
    }
  }
  cert.q_tilde_diag.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cert.q_tilde_diag[i] = (lambda * eta[i] + cert.delta) / theta[i];
  }

  double alpha = std::numeric_limits<double>::infinity();
  Certificate wrapped = cert;
  for (std::size_t s = 0; s < sys.num_modes(); ++s) {
    for (std::size_t r = 0; r < sys.num_modes(); ++r) {
      double margin = 0.0;
      is_negative_definite(build_block_matrix(sys, wrapped, s, r), margin);
      alpha = std::min(alpha, -margin);
    }
  }
  if (!(alpha > 0.0)) {
    throw WitnessError("constructed blocks are not negative definite (product gap too small)");
  }
  cert.epsilon = epsilon_from_alpha(alpha, cert.delay, n);
  return cert;
}

SwitchedL1Certificate synthesize_switched_l1(const SwitchedDelaySystem& sys,
                                             const std::vector<DenseVector>& d_family,
                                             const DenseVector& theta, double mu, double lambda) {
  if (sys.delay() != 1) {
    throw std::invalid_argument("synthesize_switched_l1: delay must be one");
  }
  if (d_family.size() != sys.num_modes()) {
    throw std::invalid_argument("synthesize_switched_l1: need one d vector per mode");
  }
  const std::size_t n = sys.dim();
  for (const auto& d : d_family) require_strictly_positive(d, "d family");
  require_strictly_positive(theta, "theta");
  if (!(lambda * mu < 1.0)) {
    throw WitnessError("scaling product lambda*mu = " + std::to_string(lambda * mu) +
                       " is not below one");
  }
  double scale = 1.0;
  for (const auto& d : d_family) scale = std::max(scale, witness_scale(d));
  if (coupled_slack(sys, CoupledVariant::prop4, mu, d_family) < -kReverifyTol * scale) {
    throw WitnessError("d family does not satisfy the coupled system at mu");
  }
  if (scaling_slack(m2_set(sys), lambda, theta) < -kReverifyTol * witness_scale(theta)) {
    throw WitnessError("theta does not satisfy the per-mode sum system at lambda");
  }

  SwitchedL1Certificate cert;
  cert.d_family = d_family;
  cert.theta = theta;
  cert.mu = mu;
  cert.lambda = lambda;

  cert.p_diags.assign(sys.num_modes(), DenseVector(n, 0.0));
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sys.num_modes(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      cert.p_diags[s][i] = d_family[s][i] / theta[i];
      min_d = std::min(min_d, d_family[s][i]);
    }
  }
  cert.delta = 0.5 * (1.0 - lambda * mu) * min_d;

  // Q^(s) theta = lambda * max over m of B_s^T d^(m) + delta e.
  cert.q_diags.assign(sys.num_modes(), DenseVector(n, 0.0));
  for (std::size_t s = 0; s < sys.num_modes(); ++s) {
    const DenseMatrix bt = transpose(sys.b_last(s));
    DenseVector eta(n, 0.0);
    for (std::size_t m = 0; m < sys.num_modes(); ++m) {
      const DenseVector bd = mat_vec(bt, d_family[m]);
      for (std::size_t i = 0; i < n; ++i) eta[i] = std::max(eta[i], bd[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      cert.q_diags[s][i] = (lambda * eta[i] + cert.delta) / theta[i];
    }
  }
  return cert;
}

DenseMatrix build_block_matrix(const SwitchedDelaySystem& sys, const Certificate& cert,
                               std::size_t s, std::optional<std::size_t> r_opt) {
  if (s >= sys.num_modes()) throw std::invalid_argument("build_block_matrix: mode out of range");
  const std::size_t r = r_opt.value_or(s);
  if (r >= sys.num_modes()) {
    throw std::invalid_argument("build_block_matrix: target mode out of range");
  }
  const BlockInputs in = block_inputs(cert, s, r);
  const DenseMatrix b = sys.summed_delay_blocks(s);
  return assemble_block(sys.a(s), b, in.p, in.p_subtract, in.q_add, in.q_subtract);
}

VerificationReport verify_certificate(const SwitchedDelaySystem& sys, const Certificate& cert) {
  VerificationReport report;
  const DenseVector& theta = certificate_theta(cert);
  DenseVector w(2 * theta.size());
  std::copy(theta.begin(), theta.end(), w.begin());
  std::copy(theta.begin(), theta.end(), w.begin() + theta.size());

  const bool switched = form_is_switched(certificate_form(cert));
  const std::size_t modes = sys.num_modes();
  double worst = -std::numeric_limits<double>::infinity();
  bool all_negative = true;
  bool all_metzler = true;

  auto probe = [&](std::size_t s, std::size_t r) {
    const DenseMatrix block = build_block_matrix(sys, cert, s, switched ? std::optional(r)
                                                                        : std::nullopt);
    IndexMargin m;
    m.s = s;
    m.r = r;
    is_negative_definite(block, m.largest_eigenvalue);
    m.metzler_ok = metzler_negativity_witness(block, w);
    worst = std::max(worst, m.largest_eigenvalue);
    all_negative = all_negative && m.largest_eigenvalue < 0.0;
    all_metzler = all_metzler && m.metzler_ok;
    report.margins.push_back(m);
  };

  for (std::size_t s = 0; s < modes; ++s) {
    if (switched) {
      for (std::size_t r = 0; r < modes; ++r) probe(s, r);
    } else {
      probe(s, s);
    }
  }

  report.worst_margin = worst;
  report.accepted = all_negative && all_metzler;
  const double alpha = -worst;
  report.beta = std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SwitchedL1Certificate>) {
          return alpha;
        } else {
          const double l = static_cast<double>(c.delay);
          return std::min(alpha - l * c.epsilon, c.epsilon);
        }
      },
      cert);
  if (!report.accepted) report.beta = 0.0;
  return report;
}

double evaluate_functional(const Certificate& cert, const std::vector<DenseVector>& history,
                           std::size_t sigma, const std::function<double(double)>& f) {
  const std::size_t l = certificate_delay(cert);
  if (history.size() != l + 1) {
    throw std::invalid_argument("evaluate_functional: history must hold delay+1 states");
  }
  const FunctionalForm form = certificate_form(cert);
  const bool on_states = form_applies_to_states(form);

  auto quad = [&](const DenseVector& diag, const DenseVector& x, bool through_f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = through_f ? f(x[i]) : x[i];
      sum += diag[i] * z * z;
    }
    return sum;
  };

  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        double v = 0.0;
        if constexpr (std::is_same_v<T, CommonDiagonalCertificate>) {
          v += quad(c.p_diag, history[0], false);
          for (std::size_t m = 1; m <= c.delay; ++m) {
            DenseVector qm = c.q_diag;
            const double shift = static_cast<double>(c.delay - m + 1) * c.epsilon;
            for (double& x : qm) x += shift;
            v += quad(qm, history[m], !on_states);
          }
        } else if constexpr (std::is_same_v<T, SwitchedDiagonalCertificate>) {
          v += quad(c.p_diags.at(sigma), history[0], false);
          for (std::size_t m = 1; m <= c.delay; ++m) {
            DenseVector qm = c.q_tilde_diag;
            const double shift = static_cast<double>(c.delay - m + 1) * c.epsilon;
            for (double& x : qm) x += shift;
            v += quad(qm, history[m], !on_states);
          }
        } else {
          v += quad(c.p_diags.at(sigma), history[0], false);
          v += quad(c.q_diags.at(sigma), history[1], true);
        }
        return v;
      },
      cert);
}

}  // namespace diagstab
