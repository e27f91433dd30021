#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace diagstab {

using DenseVector = std::vector<double>;

/// Dense row-major real matrix. All entries are required to be finite; the
/// factory functions validate this, arithmetic preserves it.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static DenseMatrix identity(std::size_t n);
  /// Builds from nested rows; throws std::invalid_argument on ragged rows or
  /// non-finite entries.
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> entries() const { return data_; }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double scale, const DenseMatrix& a);
bool operator==(const DenseMatrix& a, const DenseMatrix& b);
DenseVector mat_vec(const DenseMatrix& a, const DenseVector& v);
double max_abs(const DenseMatrix& a);
double max_row_sum(const DenseMatrix& a);

double norm2(const DenseVector& v);
bool is_strictly_positive(const DenseVector& v);
bool is_nonnegative(const DenseVector& v);

/// Entrywise sign classification with an exact zero threshold.
enum class PositivityClass { none, nonnegative, strictly_positive };
PositivityClass classify_positivity(const DenseMatrix& a);
PositivityClass classify_positivity(const DenseVector& v);

/// True iff every entry is >= 0 exactly.
bool is_nonnegative(const DenseMatrix& a);

/// Certified enclosure for the spectral radius of a nonnegative matrix.
struct SpectralEnclosure {
  double lower = 0.0;
  double upper = 0.0;
  long iterations = 0;
  bool converged = false;
  double value() const { return 0.5 * (lower + upper); }
};

/// Spectral radius of a nonnegative square matrix within absolute tolerance
/// tol. Power iteration on A + 1e-12*I with Collatz-Wielandt bounds as the
/// stopping criterion; a repeated-squaring bound refinement handles reducible
/// and defective spectra the plain iteration cannot resolve. Throws
/// std::invalid_argument for non-square or negative input and
/// ConvergenceError (carrying the current enclosure) past the iteration cap.
double spectral_radius(const DenseMatrix& a, double tol);
SpectralEnclosure spectral_radius_enclosure(const DenseMatrix& a, double tol);

/// Largest eigenvalue test for symmetric matrices via cyclic Jacobi sweeps.
/// S must be symmetric to within 1e-12 relative asymmetry. margin_out
/// receives the largest eigenvalue.
bool is_negative_definite(const DenseMatrix& s, double& margin_out);
bool is_negative_definite(const DenseMatrix& s);

/// All eigenvalues of a symmetric matrix (ascending). Same asymmetry
/// contract as is_negative_definite.
DenseVector symmetric_eigenvalues(const DenseMatrix& s);

/// Strict Metzler negativity test: true iff S*w << 0 entrywise. S must be
/// square Metzler (off-diagonal entries >= 0) and w strictly positive. This
/// is the independent route for certifying that a symmetric Metzler block
/// matrix is Hurwitz, hence negative definite.
bool metzler_negativity_witness(const DenseMatrix& s, const DenseVector& w);

}  // namespace diagstab
