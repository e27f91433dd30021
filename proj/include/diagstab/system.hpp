#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "diagstab/linalg.hpp"

namespace diagstab {

/// Which update rule the matrices describe.
///   persidskii:  x(k+1) = A f(x(k)) + sum_m B_m f(x(k-m))
///   filter:      x(k+1) = f(A x(k) + sum_m B_m x(k-m))
///   network:     persidskii rule plus a bounded input u(k)
enum class ModelKind { persidskii, filter, network };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

/// A switched positive system with delay: N modes of dimension n, delay l.
/// Delay blocks are stored per delay then per mode; single-delay systems keep
/// one nonzero block per mode at delay l and zero blocks below it.
class SwitchedDelaySystem {
 public:
  /// Single-delay constructor: one B per mode, acting at delay l.
  static SwitchedDelaySystem single_delay(std::vector<DenseMatrix> a,
                                          std::vector<DenseMatrix> b, std::size_t delay = 1,
                                          ModelKind kind = ModelKind::persidskii);

  /// Multi-delay constructor: blocks[m][s] acts at delay m+1 on mode s+1.
  static SwitchedDelaySystem multi_delay(std::vector<DenseMatrix> a,
                                         std::vector<std::vector<DenseMatrix>> blocks,
                                         ModelKind kind = ModelKind::persidskii);

  std::size_t dim() const { return n_; }
  std::size_t num_modes() const { return num_modes_; }
  std::size_t delay() const { return delay_; }
  ModelKind model_kind() const { return kind_; }
  void set_model_kind(ModelKind kind) { kind_ = kind; }

  const DenseMatrix& a(std::size_t mode) const { return a_.at(mode); }
  /// Delay block for delay index m in 1..l (0-based parameter m-1).
  const DenseMatrix& b(std::size_t delay_index, std::size_t mode) const {
    return b_.at(delay_index).at(mode);
  }
  /// The block at the nominal delay l.
  const DenseMatrix& b_last(std::size_t mode) const { return b_.back().at(mode); }

  /// True when every delay block below l is zero (one effective block per
  /// mode), which the single-delay theorems require.
  bool single_delay_structure() const;

  /// Sum of all delay blocks of one mode.
  DenseMatrix summed_delay_blocks(std::size_t mode) const;

  std::string name;

 private:
  SwitchedDelaySystem() = default;
  void validate() const;

  std::size_t n_ = 0;
  std::size_t num_modes_ = 0;
  std::size_t delay_ = 1;
  ModelKind kind_ = ModelKind::persidskii;
  std::vector<DenseMatrix> a_;
  std::vector<std::vector<DenseMatrix>> b_;  // [delay-1][mode]
};

/// The two-mode two-dimensional benchmark family used across the test suite,
/// parameterized by a > 0 (which enters the (1,1) entry of B1).
SwitchedDelaySystem benchmark_system(double a, ModelKind kind = ModelKind::persidskii);

}  // namespace diagstab
