#include "diagstab/system.hpp"

#include <stdexcept>
#include <utility>

#include "diagstab/errors.hpp"

namespace diagstab {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::persidskii: return "persidskii";
    case ModelKind::filter: return "filter";
    case ModelKind::network: return "network";
  }
  return "persidskii";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "persidskii") return ModelKind::persidskii;
  if (s == "filter") return ModelKind::filter;
  if (s == "network") return ModelKind::network;
  throw InputError("unknown model kind '" + s + "' (expected persidskii, filter or network)");
}

SwitchedDelaySystem SwitchedDelaySystem::single_delay(std::vector<DenseMatrix> a,
                                                      std::vector<DenseMatrix> b,
                                                      std::size_t delay, ModelKind kind) {
  if (delay == 0) throw std::invalid_argument("SwitchedDelaySystem: delay must be >= 1");
  if (a.empty() || a.size() != b.size()) {
    throw std::invalid_argument("SwitchedDelaySystem: need one A and one B per mode");
  }
  SwitchedDelaySystem sys;
  sys.n_ = a.front().rows();
  sys.num_modes_ = a.size();
  sys.delay_ = delay;
  sys.kind_ = kind;
  sys.a_ = std::move(a);
  sys.b_.assign(delay, std::vector<DenseMatrix>(sys.num_modes_, DenseMatrix(sys.n_, sys.n_)));
  sys.b_.back() = std::move(b);
  sys.validate();
  return sys;
}

SwitchedDelaySystem SwitchedDelaySystem::multi_delay(std::vector<DenseMatrix> a,
                                                     std::vector<std::vector<DenseMatrix>> blocks,
                                                     ModelKind kind) {
  if (a.empty() || blocks.empty()) {
    throw std::invalid_argument("SwitchedDelaySystem: empty matrix family");
  }
  SwitchedDelaySystem sys;
  sys.n_ = a.front().rows();
  sys.num_modes_ = a.size();
  sys.delay_ = blocks.size();
  sys.kind_ = kind;
  sys.a_ = std::move(a);
  sys.b_ = std::move(blocks);
  sys.validate();
  return sys;
}

void SwitchedDelaySystem::validate() const {
  auto check = [&](const DenseMatrix& m, const std::string& label) {
    if (m.rows() != n_ || m.cols() != n_) {
      throw std::invalid_argument("SwitchedDelaySystem: " + label + " must be " +
                                  std::to_string(n_) + "x" + std::to_string(n_));
    }
    if (!is_nonnegative(m)) {
      throw std::invalid_argument("SwitchedDelaySystem: " + label + " has a negative entry");
    }
  };
  for (std::size_t s = 0; s < num_modes_; ++s) check(a_[s], "A[" + std::to_string(s) + "]");
  for (std::size_t m = 0; m < delay_; ++m) {
    if (b_[m].size() != num_modes_) {
      throw std::invalid_argument("SwitchedDelaySystem: delay block row " + std::to_string(m) +
                                  " must hold one matrix per mode");
    }
    for (std::size_t s = 0; s < num_modes_; ++s) {
      check(b_[m][s], "B[" + std::to_string(m) + "][" + std::to_string(s) + "]");
    }
  }
}

bool SwitchedDelaySystem::single_delay_structure() const {
  for (std::size_t m = 0; m + 1 < delay_; ++m) {
    for (std::size_t s = 0; s < num_modes_; ++s) {
      if (max_abs(b_[m][s]) != 0.0) return false;
    }
  }
  return true;
}

DenseMatrix SwitchedDelaySystem::summed_delay_blocks(std::size_t mode) const {
  DenseMatrix sum(n_, n_, 0.0);
  for (std::size_t m = 0; m < delay_; ++m) sum = sum + b_[m][mode];
  return sum;
}

SwitchedDelaySystem benchmark_system(double a, ModelKind kind) {
  if (!(a > 0.0)) throw std::invalid_argument("benchmark_system: a must be positive");
  const DenseMatrix a1 = 0.25 * DenseMatrix::from_rows({{0.0, 0.0}, {1.0, 1.0}});
  const DenseMatrix b1 = 0.25 * DenseMatrix::from_rows({{a, 1.0}, {2.0, 0.0}});
  const DenseMatrix a2 = 0.25 * DenseMatrix::from_rows({{0.0, 1.0}, {0.0, 2.0}});
  const DenseMatrix b2 = 0.25 * DenseMatrix::from_rows({{1.0, 1.0}, {0.0, 0.0}});
  auto sys = SwitchedDelaySystem::single_delay({a1, a2}, {b1, b2}, 1, kind);
  sys.name = "two-mode benchmark (a=" + std::to_string(a) + ")";
  return sys;
}

}  // namespace diagstab
