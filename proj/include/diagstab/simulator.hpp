#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "diagstab/certificate.hpp"
#include "diagstab/system.hpp"

namespace diagstab {

/// Scalar sector nonlinearity applied componentwise: x*f(x) > 0 for x != 0
/// and |f(x)| <= |x|. Construction runs a randomized self-test of both
/// conditions and refuses parameters that break them.
class Nonlinearity {
 public:
  enum class Kind { identity, tanh, saturation, rational, scaled_linear };

  static Nonlinearity identity();
  static Nonlinearity tanh();
  static Nonlinearity saturation(double limit);
  static Nonlinearity rational();
  static Nonlinearity scaled_linear(double c);
  /// Parses "identity", "tanh", "saturation", "rational" or "scaled:<c>".
  static Nonlinearity from_string(const std::string& spec);

  double operator()(double x) const;
  DenseVector apply(const DenseVector& x) const;

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  bool radially_unbounded() const { return radially_unbounded_; }
  std::string label() const;

 private:
  Nonlinearity(Kind kind, double param, bool radially_unbounded);
  void self_test() const;

  Kind kind_;
  double param_;
  bool radially_unbounded_;
};

/// All catalog nonlinearities with default parameters (saturation limit 1,
/// scaled-linear factor 0.5).
std::vector<Nonlinearity> nonlinearity_catalog();

struct SwitchingSignal {
  enum class Kind { fixed, periodic, random, adversarial_greedy };
  Kind kind = Kind::fixed;
  std::size_t fixed_mode = 0;        // 0-based
  std::vector<std::size_t> pattern;  // 0-based modes, cycled
  std::uint64_t seed = 0;

  static SwitchingSignal fixed(std::size_t mode);
  static SwitchingSignal periodic(std::vector<std::size_t> pattern);
  static SwitchingSignal random(std::uint64_t seed);
  static SwitchingSignal adversarial_greedy();
  /// Parses "fixed:<s>", "periodic:<s1,s2,...>" (1-based modes), "random" or
  /// "adversarial".
  static SwitchingSignal from_string(const std::string& spec, std::uint64_t seed,
                                     std::size_t num_modes);
};

struct InputSignal {
  enum class Kind { zero, constant, bounded_random };
  Kind kind = Kind::zero;
  DenseVector constant;
  std::uint64_t seed = 0;
  double amplitude = 0.0;  // bounded_random draws uniformly from [0, amplitude]

  static InputSignal zero();
  static InputSignal constant_input(DenseVector u);
  static InputSignal bounded_random(std::uint64_t seed, double amplitude);
  /// Parses "zero", "constant:<v>" (scalar or n values) or "random:<amp>".
  static InputSignal from_string(const std::string& spec, std::uint64_t seed, std::size_t n);
};

/// states[i] is x(i - l) for i = 0..horizon+l (initial history included);
/// modes[k] is the active mode at step k (0-based, length horizon+1 so the
/// functional is defined at the final step too); v_values[k] = V at step k.
struct Trajectory {
  std::size_t n = 0;
  std::size_t delay = 0;
  std::size_t horizon = 0;
  std::vector<DenseVector> states;
  std::vector<std::size_t> modes;
  std::optional<std::vector<double>> v_values;

  const DenseVector& state_at(long k) const { return states.at(static_cast<std::size_t>(k + static_cast<long>(delay))); }
};

/// One update of the active model. history is newest first: history[j] is
/// x(k-j), length l+1. u is only allowed for the network model.
DenseVector step(const SwitchedDelaySystem& sys, const std::vector<DenseVector>& history,
                 std::size_t mode, const Nonlinearity& f, const DenseVector* u = nullptr);

/// Iterates step() for horizon steps. init_history is newest first
/// (x(0), x(-1), ..., x(-l)). When cert is given, V is recorded along the
/// run with the active mode. Deterministic for fixed seeds.
Trajectory simulate(const SwitchedDelaySystem& sys, const Nonlinearity& f,
                    const SwitchingSignal& signal, const InputSignal& input,
                    const std::vector<DenseVector>& init_history, std::size_t horizon,
                    const Certificate* cert = nullptr);

struct DecreaseReport {
  std::size_t steps_evaluated = 0;
  std::size_t violations = 0;
  /// max over steps of  (V(k+1) - V(k)) / sum_j ||f(x(k-j))||^2; absent when
  /// every step was vacuous (zero denominator).
  std::optional<double> max_ratio;
};

/// Checks the certified decrease along a recorded trajectory. A violation is
/// a step whose ratio fails to be negative (ratio > -1e-12); callers compare
/// max_ratio against -beta from verify_certificate.
DecreaseReport monitor_decrease(const Trajectory& traj, const Certificate& cert,
                                const Nonlinearity& f);

struct UltimateBoundednessReport {
  double initial_bound = 0.0;  // D
  double r_emp = 0.0;          // sup norm over the tail window across the batch
  std::size_t k_tilde = 0;     // first step after which all norms stay <= r_emp*(1+1e-9)
  double beta1_emp = 0.0;
  double beta2_emp = 0.0;
  bool diverged = false;
  std::size_t divergence_step = 0;
  std::size_t batch_size = 0;
  std::string note;
};

/// Batch simulation from initial histories with ||x|| <= D (axis patterns,
/// a uniform pattern, and seeded random nonnegative corners). The tail window
/// is the last 20% of the horizon. beta1/beta2 are least-squares fits of
/// dV = -beta1 * sum||f||^2 + beta2 and need a certificate; without one the
/// fit is skipped. Norms above 1e12 abort the batch with a divergence report.
UltimateBoundednessReport probe_ultimate_bound(const SwitchedDelaySystem& sys,
                                               const Nonlinearity& f, const InputSignal& input,
                                               const SwitchingSignal& signal, double initial_bound,
                                               std::size_t horizon,
                                               const Certificate* cert = nullptr);

/// CSV export: header k,sigma,x1..xn,V then one row per recorded state (the
/// initial history rows carry empty sigma/V cells), LF line endings.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace diagstab
