#include <doctest.h>

#include <cmath>
#include <random>

#include "diagstab/analyzer.hpp"
#include "diagstab/errors.hpp"
#include "diagstab/simulator.hpp"

using namespace diagstab;

namespace {

Certificate benchmark_certificate(double a, ModelKind kind = ModelKind::persidskii) {
  const auto sys = benchmark_system(a, kind);
  const TheoremOutcome t4 = check_theorem4(sys, 1e-9);
  REQUIRE(t4.status == TheoremStatus::holds);
  return synthesize_common(sys, t4.d_witness->v, t4.theta_witness->v, t4.numbers.at("mu"),
                           t4.numbers.at("lambda"));
}

std::vector<DenseVector> ones_history(std::size_t n, std::size_t l, double value = 1.0) {
  return std::vector<DenseVector>(l + 1, DenseVector(n, value));
}

}  // namespace

TEST_CASE("sector catalog self-checks") {
  const auto catalog = nonlinearity_catalog();
  CHECK(catalog.size() == 5);
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (const auto& f : catalog) {
    for (int i = 0; i < 100000; ++i) {
      const double x = dist(rng);
      if (x == 0.0) continue;
      const double fx = f(x);
      CHECK(x * fx > 0.0);
      CHECK(std::fabs(fx) <= std::fabs(x));
    }
    CHECK(f(0.0) == 0.0);
  }
  CHECK(Nonlinearity::identity().radially_unbounded());
  CHECK(Nonlinearity::scaled_linear(0.5).radially_unbounded());
  CHECK_FALSE(Nonlinearity::tanh().radially_unbounded());
  CHECK_FALSE(Nonlinearity::saturation(2.0).radially_unbounded());
  CHECK_FALSE(Nonlinearity::rational().radially_unbounded());

  CHECK_THROWS_AS(Nonlinearity::scaled_linear(1.5), std::invalid_argument);
  CHECK_THROWS_AS(Nonlinearity::saturation(-1.0), std::invalid_argument);
  CHECK(Nonlinearity::from_string("scaled:0.25").parameter() == doctest::Approx(0.25));
  CHECK_THROWS_AS(Nonlinearity::from_string("cubic"), InputError);
}

TEST_CASE("single step on fixed instances") {
  const auto sys = benchmark_system(2.0);
  const auto id = Nonlinearity::identity();

  CHECK(step(sys, ones_history(2, 1, 0.0), 0, id) == DenseVector{0.0, 0.0});

  // Mode 2 on the all-ones history: A2*(1,1) + B2*(1,1) = (3/4, 1/2).
  const DenseVector next = step(sys, ones_history(2, 1), 1, id);
  CHECK(next[0] == doctest::Approx(0.75));
  CHECK(next[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(step(sys, ones_history(2, 1), 5, id), std::invalid_argument);
  CHECK_THROWS_AS(step(sys, ones_history(2, 2), 0, id), std::invalid_argument);
  const DenseVector u{0.1, 0.1};
  CHECK_THROWS_AS(step(sys, ones_history(2, 1), 0, id, &u), std::invalid_argument);

  // Filter kind applies f outside the affine part.
  const auto filt = benchmark_system(2.0, ModelKind::filter);
  const auto sat = Nonlinearity::saturation(0.5);
  const DenseVector clipped = step(filt, ones_history(2, 1), 1, sat);
  CHECK(clipped[0] == doctest::Approx(0.5));  // saturated at the limit
  CHECK(clipped[1] == doctest::Approx(0.5));

  // Network kind adds the input after the nonlinear part.
  const auto net = benchmark_system(2.0, ModelKind::network);
  const DenseVector driven = step(net, ones_history(2, 1), 1, id, &u);
  CHECK(driven[0] == doctest::Approx(0.85));
  CHECK(driven[1] == doctest::Approx(0.6));
}

TEST_CASE("simulation basics") {
  const auto sys = benchmark_system(2.0);
  const auto id = Nonlinearity::identity();

  const Trajectory zero = simulate(sys, id, SwitchingSignal::random(3), InputSignal::zero(),
                                   ones_history(2, 1, 0.0), 50);
  for (const auto& x : zero.states) {
    CHECK(x == DenseVector{0.0, 0.0});
  }
  CHECK(zero.states.size() == 52);
  CHECK(zero.modes.size() == 51);

  // Bit-exact determinism for equal seeds.
  const Trajectory t1 = simulate(sys, id, SwitchingSignal::random(9), InputSignal::zero(),
                                 ones_history(2, 1), 100);
  const Trajectory t2 = simulate(sys, id, SwitchingSignal::random(9), InputSignal::zero(),
                                 ones_history(2, 1), 100);
  REQUIRE(t1.states.size() == t2.states.size());
  for (std::size_t i = 0; i < t1.states.size(); ++i) {
    CHECK(t1.states[i] == t2.states[i]);
  }
  CHECK(t1.modes == t2.modes);

  // Periodic and fixed signals follow their schedule.
  const Trajectory per = simulate(sys, id, SwitchingSignal::periodic({0, 1, 1}),
                                  InputSignal::zero(), ones_history(2, 1), 6);
  CHECK(per.modes == std::vector<std::size_t>{0, 1, 1, 0, 1, 1, 0});
  const Trajectory fix = simulate(sys, id, SwitchingSignal::fixed(1), InputSignal::zero(),
                                  ones_history(2, 1), 3);
  CHECK(fix.modes == std::vector<std::size_t>{1, 1, 1, 1});
}

TEST_CASE("positivity of simulated trajectories") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> dist(0.0, 2.0);
  const auto catalog = nonlinearity_catalog();
  for (int trial = 0; trial < 200; ++trial) {
    const ModelKind kind = static_cast<ModelKind>(trial % 3);
    const auto sys = benchmark_system(0.5 + dist(rng), kind);
    const auto& f = catalog[trial % catalog.size()];
    std::vector<DenseVector> init{{dist(rng), dist(rng)}, {dist(rng), dist(rng)}};
    const SwitchingSignal sig = (trial % 2 == 0)
                                    ? SwitchingSignal::random(trial)
                                    : SwitchingSignal::periodic({0, 1});
    const InputSignal input = kind == ModelKind::network
                                  ? InputSignal::bounded_random(trial, 0.3)
                                  : InputSignal::zero();
    const Trajectory traj = simulate(sys, f, sig, input, init, 40);
    for (const auto& x : traj.states) {
      for (double xi : x) CHECK(xi >= 0.0);
    }
  }
}

TEST_CASE("certified run decays and the functional decreases") {
  const auto sys = benchmark_system(2.0);
  const Certificate cert = benchmark_certificate(2.0);
  const VerificationReport vreport = verify_certificate(sys, cert);
  REQUIRE(vreport.accepted);

  const auto tanh_f = Nonlinearity::tanh();
  const Trajectory traj = simulate(sys, tanh_f, SwitchingSignal::random(11),
                                   InputSignal::zero(), ones_history(2, 1), 200, &cert);
  const double initial = norm2(traj.state_at(0));
  const double final_norm = norm2(traj.state_at(200));
  CHECK(final_norm <= 1e-6 * initial);

  const DecreaseReport report = monitor_decrease(traj, cert, tanh_f);
  CHECK(report.violations == 0);
  REQUIRE(report.max_ratio.has_value());
  CHECK(*report.max_ratio <= -vreport.beta + 1e-9);
}

TEST_CASE("adversarial and random switching both converge on certified systems") {
  const auto sys = benchmark_system(2.0);
  const Certificate cert = benchmark_certificate(2.0);
  for (const auto& f : nonlinearity_catalog()) {
    for (const auto& sig : {SwitchingSignal::adversarial_greedy(), SwitchingSignal::random(1),
                            SwitchingSignal::fixed(0), SwitchingSignal::periodic({1, 0})}) {
      const Trajectory traj =
          simulate(sys, f, sig, InputSignal::zero(), ones_history(2, 1), 300, &cert);
      CHECK(norm2(traj.state_at(300)) <= 1e-5);
      const DecreaseReport report = monitor_decrease(traj, cert, f);
      CHECK(report.violations == 0);
    }
  }
}

TEST_CASE("decrease monitor flags a wrong pairing instead of throwing") {
  // Grow-only system paired with a certificate for a different system.
  const auto unstable = SwitchedDelaySystem::single_delay(
      {2.0 * DenseMatrix::identity(2)}, {DenseMatrix(2, 2, 0.0)});
  const Certificate cert = benchmark_certificate(2.0);
  const auto id = Nonlinearity::identity();
  const Trajectory traj = simulate(unstable, id, SwitchingSignal::fixed(0), InputSignal::zero(),
                                   ones_history(2, 1), 20, &cert);
  const DecreaseReport report = monitor_decrease(traj, cert, id);
  CHECK(report.violations > 0);

  const Trajectory zero_run = simulate(unstable, id, SwitchingSignal::fixed(0),
                                       InputSignal::zero(), ones_history(2, 1, 0.0), 20, &cert);
  const DecreaseReport vacuous = monitor_decrease(zero_run, cert, id);
  CHECK(vacuous.violations == 0);
  CHECK(vacuous.steps_evaluated == 0);
  CHECK_FALSE(vacuous.max_ratio.has_value());

  const Trajectory no_v = simulate(unstable, id, SwitchingSignal::fixed(0), InputSignal::zero(),
                                   ones_history(2, 1), 5);
  CHECK_THROWS_AS(monitor_decrease(no_v, cert, id), std::invalid_argument);
}

TEST_CASE("switched certificate decreases along every pairing") {
  const auto sys = benchmark_system(2.25);
  const auto [lambda, theta] = minimal_scaling(m2_set(sys), 1e-9);
  const Certificate cert =
      synthesize_switched_l1(sys, {{1.179, 0.5}, {1.3, 1.0}}, theta.v, 1.152, lambda);
  const VerificationReport vreport = verify_certificate(sys, cert);
  REQUIRE(vreport.accepted);
  for (const auto& f : nonlinearity_catalog()) {
    const Trajectory traj = simulate(sys, f, SwitchingSignal::adversarial_greedy(),
                                     InputSignal::zero(), ones_history(2, 1), 400, &cert);
    const DecreaseReport report = monitor_decrease(traj, cert, f);
    CHECK(report.violations == 0);
    if (report.max_ratio) CHECK(*report.max_ratio <= -vreport.beta + 1e-9);
  }
}

TEST_CASE("delay-one switched certificates from random systems also decrease") {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> dist(0.0, 0.4);
  int built = 0;
  while (built < 5) {
    std::vector<DenseMatrix> a, b;
    for (int s = 0; s < 2; ++s) {
      DenseMatrix ma(2, 2), mb(2, 2);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          ma(i, j) = dist(rng);
          mb(i, j) = dist(rng);
        }
      a.push_back(ma);
      b.push_back(mb);
    }
    const auto sys = SwitchedDelaySystem::single_delay(std::move(a), std::move(b));
    const TheoremOutcome p4 = check_prop4(sys, 1e-9);
    if (p4.status != TheoremStatus::holds || p4.numbers.at("product") > 0.9) continue;
    ++built;
    const Certificate cert = synthesize_switched_l1(
        sys, p4.coupled_witness->d_family, p4.theta_witness->v, p4.numbers.at("mu"),
        p4.numbers.at("lambda"));
    const VerificationReport vreport = verify_certificate(sys, cert);
    REQUIRE(vreport.accepted);
    for (const auto& f : nonlinearity_catalog()) {
      for (const auto& sig :
           {SwitchingSignal::adversarial_greedy(), SwitchingSignal::random(built)}) {
        const Trajectory traj =
            simulate(sys, f, sig, InputSignal::zero(), ones_history(2, 1), 300, &cert);
        const DecreaseReport mon = monitor_decrease(traj, cert, f);
        CHECK(mon.violations == 0);
        if (mon.max_ratio) CHECK(*mon.max_ratio <= -vreport.beta + 1e-9);
      }
    }
  }
}

TEST_CASE("ultimate boundedness probe") {
  const auto net = benchmark_system(2.0, ModelKind::network);
  const auto id = Nonlinearity::identity();
  const Certificate cert = benchmark_certificate(2.0, ModelKind::network);

  // Zero input reduces to asymptotic decay.
  const UltimateBoundednessReport zero = probe_ultimate_bound(
      net, id, InputSignal::zero(), SwitchingSignal::random(2), 1.0, 400, &cert);
  CHECK_FALSE(zero.diverged);
  CHECK(zero.r_emp <= 1e-6);
  CHECK(zero.beta1_emp > 0.0);

  // Constant input: finite bound, entry step within the horizon.
  const UltimateBoundednessReport driven = probe_ultimate_bound(
      net, id, InputSignal::constant_input({0.1, 0.1}), SwitchingSignal::random(2), 10.0, 400,
      &cert);
  CHECK_FALSE(driven.diverged);
  CHECK(driven.r_emp > 0.01);
  CHECK(driven.r_emp < 10.0);
  CHECK(driven.k_tilde <= 400);

  // A non-radially-unbounded f carries the applicability warning.
  const UltimateBoundednessReport warned = probe_ultimate_bound(
      net, Nonlinearity::tanh(), InputSignal::zero(), SwitchingSignal::random(2), 1.0, 100);
  CHECK(warned.note.find("radially unbounded") != std::string::npos);

  // Divergence detection.
  const auto unstable = SwitchedDelaySystem::single_delay(
      {2.0 * DenseMatrix::identity(2)}, {DenseMatrix(2, 2, 0.0)}, 1, ModelKind::network);
  const UltimateBoundednessReport blown = probe_ultimate_bound(
      unstable, id, InputSignal::constant_input({0.1, 0.1}), SwitchingSignal::fixed(0), 1.0, 200);
  CHECK(blown.diverged);
  CHECK(blown.divergence_step > 0);
}

TEST_CASE("trajectory CSV layout") {
  const auto sys = benchmark_system(2.0);
  const Certificate cert = benchmark_certificate(2.0);
  const Trajectory traj = simulate(sys, Nonlinearity::identity(), SwitchingSignal::fixed(0),
                                   InputSignal::zero(), ones_history(2, 1), 2, &cert);
  const std::string csv = trajectory_csv(traj);
  CHECK(csv.rfind("k,sigma,x1,x2,V\n", 0) == 0);
  CHECK(csv.find("\n-1,,1,1,\n") != std::string::npos);  // prehistory row
  CHECK(csv.find("\n0,1,1,1,") != std::string::npos);    // modes are 1-based in the export
  // LF endings only.
  CHECK(csv.find('\r') == std::string::npos);
}
