#include "diagstab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "diagstab/errors.hpp"

namespace diagstab {

namespace {

constexpr double kPowerShift = 1e-12;
constexpr long kIterationCap = 100000;

void ensure_square(const DenseMatrix& a, const char* who) {
  if (!a.square() || a.rows() == 0) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty, got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

double min_row_sum(const DenseMatrix& a) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j);
    best = std::min(best, s);
  }
  return best;
}

double max_diagonal(const DenseMatrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) best = std::max(best, a(i, i));
  return best;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw std::invalid_argument("DenseMatrix::from_rows: empty matrix");
  }
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) {
      throw std::invalid_argument("DenseMatrix::from_rows: ragged row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < m.cols_; ++j) {
      if (!std::isfinite(rows[i][j])) {
        throw std::invalid_argument("DenseMatrix::from_rows: non-finite entry at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      }
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> copy;
  copy.reserve(rows.size());
  for (const auto& r : rows) copy.emplace_back(r);
  return from_rows(copy);
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrix sum: dimension mismatch");
  }
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
  DenseMatrix c(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

DenseMatrix operator*(double scale, const DenseMatrix& a) {
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = scale * a(i, j);
  return c;
}

bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

DenseVector mat_vec(const DenseMatrix& a, const DenseVector& v) {
  if (a.cols() != v.size()) throw std::invalid_argument("mat_vec: dimension mismatch");
  DenseVector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double max_abs(const DenseMatrix& a) {
  double best = 0.0;
  for (double x : a.entries()) best = std::max(best, std::fabs(x));
  return best;
}

double max_row_sum(const DenseMatrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j);
    best = std::max(best, s);
  }
  return best;
}

double norm2(const DenseVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool is_strictly_positive(const DenseVector& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

bool is_nonnegative(const DenseVector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
}

PositivityClass classify_positivity(const DenseMatrix& a) {
  bool strict = true;
  for (double x : a.entries()) {
    if (x < 0.0) return PositivityClass::none;
    if (x == 0.0) strict = false;
  }
  return strict ? PositivityClass::strictly_positive : PositivityClass::nonnegative;
}

PositivityClass classify_positivity(const DenseVector& v) {
  bool strict = true;
  for (double x : v) {
    if (x < 0.0) return PositivityClass::none;
    if (x == 0.0) strict = false;
  }
  return strict ? PositivityClass::strictly_positive : PositivityClass::nonnegative;
}

bool is_nonnegative(const DenseMatrix& a) {
  return classify_positivity(a) != PositivityClass::none;
}

namespace {

// Collatz-Wielandt step: for v >> 0 and nonnegative B, min_i (Bv)_i/v_i and
// max_i (Bv)_i/v_i enclose rho(B). Subdominant components can underflow to
// exact zero under prolonged iteration; the min over the remaining support
// is still a valid lower bound (max-min characterization over v >= 0), but
// the max is only an upper bound for full support, so hi is reported as
// unusable once the support shrinks.
void cw_bounds(const DenseMatrix& b, const DenseVector& v, double& lo, double& hi,
               bool& full_support, DenseVector& out) {
  out = mat_vec(b, v);
  lo = std::numeric_limits<double>::infinity();
  hi = 0.0;
  full_support = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) {
      full_support = false;
      continue;
    }
    const double r = out[i] / v[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
}

// Bounds on rho(A) from row sums and the diagonal of normalized powers
// A^(2^k); valid for every nonnegative A, and the upper bound converges by
// Gelfand's formula even when the Perron eigenvalue is defective.
void refine_by_squaring(const DenseMatrix& a, double tol, SpectralEnclosure& enc) {
  const double scale0 = max_abs(a);
  if (scale0 == 0.0) {
    enc.lower = enc.upper = 0.0;
    enc.converged = true;
    return;
  }
  DenseMatrix cur = (1.0 / scale0) * a;
  double log_scale = std::log(scale0);  // A^m = exp(m-fold accumulated scale) * cur
  double m = 1.0;
  for (int stage = 0; stage < 64; ++stage) {
    const double hi_stage = max_row_sum(cur);
    if (hi_stage == 0.0) {  // nilpotent
      enc.lower = enc.upper = 0.0;
      enc.converged = true;
      return;
    }
    const double upper = std::exp((log_scale + std::log(hi_stage)) / m);
    enc.upper = std::min(enc.upper, upper);
    const double lo_stage = std::max(min_row_sum(cur), max_diagonal(cur));
    if (lo_stage > 0.0) {
      const double lower = std::exp((log_scale + std::log(lo_stage)) / m);
      enc.lower = std::max(enc.lower, lower);
    }
    if (enc.upper - enc.lower < tol) {
      enc.converged = true;
      return;
    }
    cur = cur * cur;
    const double s = max_abs(cur);
    if (s == 0.0) {
      enc.lower = enc.upper = 0.0;
      enc.converged = true;
      return;
    }
    cur = (1.0 / s) * cur;
    log_scale = 2.0 * log_scale + std::log(s);
    m *= 2.0;
  }
}

}  // namespace

SpectralEnclosure spectral_radius_enclosure(const DenseMatrix& a, double tol) {
  ensure_square(a, "spectral_radius");
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_radius: tol must be positive");
  if (!is_nonnegative(a)) {
    throw std::invalid_argument("spectral_radius: matrix has a negative entry");
  }
  const std::size_t n = a.rows();

  SpectralEnclosure enc;
  enc.lower = max_diagonal(a);
  enc.upper = max_row_sum(a);
  if (enc.upper - enc.lower < tol) {
    enc.converged = true;
    return enc;
  }

  DenseMatrix shifted = a;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += kPowerShift;

  // rho(A + eps*I) = rho(A) + eps for nonnegative A, so the bounds transfer
  // back by subtracting the shift.
  DenseVector v(n, 1.0), w;
  auto power_rounds = [&](long count) {
    for (long it = 0; it < count; ++it) {
      double lo, hi;
      bool full_support = false;
      cw_bounds(shifted, v, lo, hi, full_support, w);
      enc.lower = std::max(enc.lower, lo - kPowerShift);
      if (full_support) enc.upper = std::min(enc.upper, hi - kPowerShift);
      ++enc.iterations;
      if (enc.upper - enc.lower < tol) {
        enc.converged = true;
        return;
      }
      const double wmax = *std::max_element(w.begin(), w.end());
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wmax;
    }
  };

  const long power_budget = 5000;
  power_rounds(power_budget);
  if (enc.converged) return enc;

  refine_by_squaring(a, tol, enc);
  if (enc.converged) return enc;

  // Keep iterating the power method up to the cap before giving up.
  power_rounds(kIterationCap - power_budget);
  if (enc.converged) return enc;
  throw ConvergenceError("spectral_radius: enclosure [" + std::to_string(enc.lower) + ", " +
                             std::to_string(enc.upper) + "] did not reach tol " +
                             std::to_string(tol) + " within " + std::to_string(kIterationCap) +
                             " iterations",
                         enc.lower, enc.upper, enc.iterations);
}

double spectral_radius(const DenseMatrix& a, double tol) {
  const SpectralEnclosure enc = spectral_radius_enclosure(a, tol);
  return std::max(0.0, enc.value());
}

namespace {

// Full diagonalization by cyclic Jacobi rotations; matrices here are small
// (at most 2n x 2n blocks), so simplicity wins over factorization libraries.
DenseVector jacobi_eigenvalues(DenseMatrix s) {
  const std::size_t n = s.rows();
  const double scale = std::max(1.0, max_abs(s));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::fabs(s(p, q)));
    if (off <= 1e-14 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (std::fabs(apq) <= 1e-16 * scale) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
  DenseVector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = s(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

DenseMatrix symmetrized(const DenseMatrix& s, const char* who) {
  ensure_square(s, who);
  const double scale = std::max(1.0, max_abs(s));
  DenseMatrix sym(s.rows(), s.rows());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = 0; j < s.rows(); ++j) {
      if (std::fabs(s(i, j) - s(j, i)) > 1e-12 * scale) {
        throw std::invalid_argument(std::string(who) + ": matrix is not symmetric at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      }
      sym(i, j) = 0.5 * (s(i, j) + s(j, i));
    }
  }
  return sym;
}

}  // namespace

DenseVector symmetric_eigenvalues(const DenseMatrix& s) {
  return jacobi_eigenvalues(symmetrized(s, "symmetric_eigenvalues"));
}

bool is_negative_definite(const DenseMatrix& s, double& margin_out) {
  const DenseVector eig = jacobi_eigenvalues(symmetrized(s, "is_negative_definite"));
  margin_out = eig.back();
  return margin_out < 0.0;
}

bool is_negative_definite(const DenseMatrix& s) {
  double margin = 0.0;
  return is_negative_definite(s, margin);
}

bool metzler_negativity_witness(const DenseMatrix& s, const DenseVector& w) {
  ensure_square(s, "metzler_negativity_witness");
  if (s.rows() != w.size()) {
    throw std::invalid_argument("metzler_negativity_witness: dimension mismatch");
  }
  if (!is_strictly_positive(w)) {
    throw std::invalid_argument("metzler_negativity_witness: w must be strictly positive");
  }
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (i != j && s(i, j) < 0.0) {
        throw std::invalid_argument("metzler_negativity_witness: matrix is not Metzler at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      }
  const DenseVector sw = mat_vec(s, w);
  return std::all_of(sw.begin(), sw.end(), [](double x) { return x < 0.0; });
}

}  // namespace diagstab
