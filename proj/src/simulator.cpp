#include "diagstab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "diagstab/errors.hpp"

namespace diagstab {

namespace {

double apply_kind(Nonlinearity::Kind kind, double param, double x) {
  switch (kind) {
    case Nonlinearity::Kind::identity: return x;
    case Nonlinearity::Kind::tanh: return std::tanh(x);
    case Nonlinearity::Kind::saturation: return std::clamp(x, -param, param);
    case Nonlinearity::Kind::rational: return x / (1.0 + std::fabs(x));
    case Nonlinearity::Kind::scaled_linear: return param * x;
  }
  return x;
}

}  // namespace

Nonlinearity::Nonlinearity(Kind kind, double param, bool radially_unbounded)
    : kind_(kind), param_(param), radially_unbounded_(radially_unbounded) {
  self_test();
}

void Nonlinearity::self_test() const {
  std::mt19937_64 rng(0x5ec7041);
  std::uniform_real_distribution<double> mag(-6.0, 6.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::copysign(std::pow(10.0, mag(rng)), i % 2 == 0 ? 1.0 : -1.0);
    const double fx = (*this)(x);
    if (!(x * fx > 0.0) || !(std::fabs(fx) <= std::fabs(x))) {
      throw std::invalid_argument("Nonlinearity: sector conditions violated at x=" +
                                  std::to_string(x));
    }
  }
  if ((*this)(0.0) != 0.0) throw std::invalid_argument("Nonlinearity: f(0) must be 0");
}

Nonlinearity Nonlinearity::identity() { return Nonlinearity(Kind::identity, 0.0, true); }
Nonlinearity Nonlinearity::tanh() { return Nonlinearity(Kind::tanh, 0.0, false); }

Nonlinearity Nonlinearity::saturation(double limit) {
  if (!(limit > 0.0)) throw std::invalid_argument("saturation limit must be positive");
  return Nonlinearity(Kind::saturation, limit, false);
}

Nonlinearity Nonlinearity::rational() { return Nonlinearity(Kind::rational, 0.0, false); }

Nonlinearity Nonlinearity::scaled_linear(double c) {
  if (!(c > 0.0) || c > 1.0) {
    throw std::invalid_argument("scaled-linear factor must lie in (0, 1]");
  }
  return Nonlinearity(Kind::scaled_linear, c, true);
}

Nonlinearity Nonlinearity::from_string(const std::string& spec) {
  if (spec == "identity") return identity();
  if (spec == "tanh") return tanh();
  if (spec == "saturation") return saturation(1.0);
  if (spec == "rational") return rational();
  if (spec.rfind("scaled:", 0) == 0) {
    try {
      return scaled_linear(std::stod(spec.substr(7)));
    } catch (const std::logic_error&) {
      throw InputError("bad scaled-linear factor in '" + spec + "'");
    }
  }
  throw InputError("unknown nonlinearity '" + spec +
                   "' (expected identity|tanh|saturation|rational|scaled:<c>)");
}

double Nonlinearity::operator()(double x) const { return apply_kind(kind_, param_, x); }

DenseVector Nonlinearity::apply(const DenseVector& x) const {
  DenseVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (*this)(x[i]);
  return out;
}

std::string Nonlinearity::label() const {
  switch (kind_) {
    case Kind::identity: return "identity";
    case Kind::tanh: return "tanh";
    case Kind::saturation: return "saturation(" + std::to_string(param_) + ")";
    case Kind::rational: return "rational";
    case Kind::scaled_linear: return "scaled:" + std::to_string(param_);
  }
  return "?";
}

std::vector<Nonlinearity> nonlinearity_catalog() {
  return {Nonlinearity::identity(), Nonlinearity::tanh(), Nonlinearity::saturation(1.0),
          Nonlinearity::rational(), Nonlinearity::scaled_linear(0.5)};
}

SwitchingSignal SwitchingSignal::fixed(std::size_t mode) {
  SwitchingSignal s;
  s.kind = Kind::fixed;
  s.fixed_mode = mode;
  return s;
}

SwitchingSignal SwitchingSignal::periodic(std::vector<std::size_t> pattern) {
  if (pattern.empty()) throw std::invalid_argument("periodic switching needs a pattern");
  SwitchingSignal s;
  s.kind = Kind::periodic;
  s.pattern = std::move(pattern);
  return s;
}

SwitchingSignal SwitchingSignal::random(std::uint64_t seed) {
  SwitchingSignal s;
  s.kind = Kind::random;
  s.seed = seed;
  return s;
}

SwitchingSignal SwitchingSignal::adversarial_greedy() {
  SwitchingSignal s;
  s.kind = Kind::adversarial_greedy;
  return s;
}

InputSignal InputSignal::zero() { return InputSignal{}; }

InputSignal InputSignal::constant_input(DenseVector u) {
  InputSignal s;
  s.kind = Kind::constant;
  s.constant = std::move(u);
  return s;
}

InputSignal InputSignal::bounded_random(std::uint64_t seed, double amplitude) {
  if (!(amplitude >= 0.0)) throw std::invalid_argument("input amplitude must be nonnegative");
  InputSignal s;
  s.kind = Kind::bounded_random;
  s.seed = seed;
  s.amplitude = amplitude;
  return s;
}

namespace {

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    try {
      out.push_back(std::stod(text.substr(pos, next - pos)));
    } catch (const std::logic_error&) {
      throw InputError(std::string("bad ") + what + " list '" + text + "'");
    }
    pos = next + 1;
  }
  if (out.empty()) throw InputError(std::string("empty ") + what + " list");
  return out;
}

}  // namespace

SwitchingSignal SwitchingSignal::from_string(const std::string& spec, std::uint64_t seed,
                                             std::size_t num_modes) {
  if (spec == "random") return random(seed);
  if (spec == "adversarial") return adversarial_greedy();
  if (spec.rfind("fixed:", 0) == 0) {
    const long mode = std::strtol(spec.c_str() + 6, nullptr, 10);
    if (mode < 1 || static_cast<std::size_t>(mode) > num_modes) {
      throw InputError("fixed switching mode out of range in '" + spec + "'");
    }
    return fixed(static_cast<std::size_t>(mode - 1));
  }
  if (spec.rfind("periodic:", 0) == 0) {
    std::vector<std::size_t> pattern;
    for (double v : parse_number_list(spec.substr(9), "switching pattern")) {
      const long mode = static_cast<long>(v);
      if (mode < 1 || static_cast<std::size_t>(mode) > num_modes) {
        throw InputError("periodic pattern mode out of range in '" + spec + "'");
      }
      pattern.push_back(static_cast<std::size_t>(mode - 1));
    }
    return periodic(std::move(pattern));
  }
  throw InputError("unknown switching spec '" + spec +
                   "' (expected fixed:<s>|periodic:<pat>|random|adversarial)");
}

InputSignal InputSignal::from_string(const std::string& spec, std::uint64_t seed, std::size_t n) {
  if (spec == "zero") return zero();
  if (spec.rfind("constant:", 0) == 0) {
    std::vector<double> values = parse_number_list(spec.substr(9), "input");
    if (values.size() == 1) values.assign(n, values.front());
    if (values.size() != n) throw InputError("constant input needs 1 or n values");
    return constant_input(std::move(values));
  }
  if (spec.rfind("random:", 0) == 0) {
    try {
      return bounded_random(seed, std::stod(spec.substr(7)));
    } catch (const std::logic_error&) {
      throw InputError("bad input amplitude in '" + spec + "'");
    }
  }
  throw InputError("unknown input spec '" + spec + "' (expected zero|constant:<v>|random:<amp>)");
}

DenseVector step(const SwitchedDelaySystem& sys, const std::vector<DenseVector>& history,
                 std::size_t mode, const Nonlinearity& f, const DenseVector* u) {
  const std::size_t l = sys.delay();
  if (history.size() != l + 1) {
    throw std::invalid_argument("step: history must hold delay+1 states, newest first");
  }
  if (mode >= sys.num_modes()) throw std::invalid_argument("step: mode out of range");
  for (const auto& x : history) {
    if (x.size() != sys.dim()) throw std::invalid_argument("step: state dimension mismatch");
  }
  if (u != nullptr && sys.model_kind() != ModelKind::network) {
    throw std::invalid_argument("step: inputs are only defined for the network model");
  }

  const std::size_t n = sys.dim();
  DenseVector next(n, 0.0);
  if (sys.model_kind() == ModelKind::filter) {
    DenseVector arg = mat_vec(sys.a(mode), history[0]);
    for (std::size_t m = 1; m <= l; ++m) {
      const DenseVector bm = mat_vec(sys.b(m - 1, mode), history[m]);
      for (std::size_t i = 0; i < n; ++i) arg[i] += bm[i];
    }
    next = f.apply(arg);
  } else {
    next = mat_vec(sys.a(mode), f.apply(history[0]));
    for (std::size_t m = 1; m <= l; ++m) {
      const DenseVector bm = mat_vec(sys.b(m - 1, mode), f.apply(history[m]));
      for (std::size_t i = 0; i < n; ++i) next[i] += bm[i];
    }
    if (sys.model_kind() == ModelKind::network && u != nullptr) {
      if (u->size() != n) throw std::invalid_argument("step: input dimension mismatch");
      for (std::size_t i = 0; i < n; ++i) next[i] += (*u)[i];
    }
  }
  return next;
}

namespace {

class SignalState {
 public:
  SignalState(const SwitchingSignal& signal, std::size_t num_modes)
      : signal_(signal), num_modes_(num_modes), rng_(signal.seed) {
    if (signal.kind == SwitchingSignal::Kind::fixed && signal.fixed_mode >= num_modes) {
      throw std::invalid_argument("switching signal: fixed mode out of range");
    }
    for (std::size_t m : signal.pattern) {
      if (m >= num_modes) throw std::invalid_argument("switching signal: pattern mode out of range");
    }
  }

  // Greedy adversarial choice wants candidate evaluation; the callback maps a
  // candidate mode to the value it would produce (functional value when a
  // certificate is attached, next-state norm otherwise).
  std::size_t pick(std::size_t k, const std::function<double(std::size_t)>& candidate_value) {
    switch (signal_.kind) {
      case SwitchingSignal::Kind::fixed: return signal_.fixed_mode;
      case SwitchingSignal::Kind::periodic: return signal_.pattern[k % signal_.pattern.size()];
      case SwitchingSignal::Kind::random: {
        std::uniform_int_distribution<std::size_t> dist(0, num_modes_ - 1);
        return dist(rng_);
      }
      case SwitchingSignal::Kind::adversarial_greedy: {
        std::size_t best = 0;
        double best_val = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < num_modes_; ++s) {
          const double val = candidate_value(s);
          if (val > best_val) {
            best_val = val;
            best = s;
          }
        }
        return best;
      }
    }
    return 0;
  }

 private:
  SwitchingSignal signal_;
  std::size_t num_modes_;
  std::mt19937_64 rng_;
};

class InputState {
 public:
  InputState(const InputSignal& input, std::size_t n)
      : input_(input), n_(n), rng_(input.seed) {
    if (input.kind == InputSignal::Kind::constant && input.constant.size() != n) {
      throw std::invalid_argument("input signal: constant vector dimension mismatch");
    }
  }

  // Returns nullptr for the zero signal so non-network models can simulate
  // without tripping the input check in step().
  const DenseVector* next() {
    switch (input_.kind) {
      case InputSignal::Kind::zero: return nullptr;
      case InputSignal::Kind::constant: return &input_.constant;
      case InputSignal::Kind::bounded_random: {
        current_.assign(n_, 0.0);
        std::uniform_real_distribution<double> dist(0.0, input_.amplitude);
        for (double& x : current_) x = dist(rng_);
        return &current_;
      }
    }
    return nullptr;
  }

 private:
  InputSignal input_;
  std::size_t n_;
  std::mt19937_64 rng_;
  DenseVector current_;
};

double evaluate_with(const Certificate* cert, const std::vector<DenseVector>& history,
                     std::size_t sigma, const Nonlinearity& f) {
  return evaluate_functional(*cert, history, sigma, [&f](double x) { return f(x); });
}

}  // namespace

Trajectory simulate(const SwitchedDelaySystem& sys, const Nonlinearity& f,
                    const SwitchingSignal& signal, const InputSignal& input,
                    const std::vector<DenseVector>& init_history, std::size_t horizon,
                    const Certificate* cert) {
  const std::size_t l = sys.delay();
  if (horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
  if (init_history.size() != l + 1) {
    throw std::invalid_argument("simulate: initial history must hold delay+1 states");
  }
  if (cert != nullptr && certificate_delay(*cert) != l) {
    throw std::invalid_argument("simulate: certificate delay does not match the system");
  }

  Trajectory traj;
  traj.n = sys.dim();
  traj.delay = l;
  traj.horizon = horizon;
  traj.states.assign(init_history.rbegin(), init_history.rend());  // oldest first storage
  if (cert != nullptr) traj.v_values.emplace();

  SignalState sig(signal, sys.num_modes());
  InputState in(input, sys.dim());

  std::vector<DenseVector> history = init_history;  // newest first
  for (std::size_t k = 0; k <= horizon; ++k) {
    const DenseVector* u = in.next();
    auto candidate_value = [&](std::size_t s) {
      const DenseVector cand = step(sys, history, s, f, u);
      if (cert != nullptr) {
        std::vector<DenseVector> nh;
        nh.push_back(cand);
        for (std::size_t j = 0; j + 1 <= l; ++j) nh.push_back(history[j]);
        return evaluate_with(cert, nh, s, f);
      }
      return norm2(cand);
    };
    const std::size_t mode = sig.pick(k, candidate_value);
    traj.modes.push_back(mode);
    if (cert != nullptr) traj.v_values->push_back(evaluate_with(cert, history, mode, f));
    if (k == horizon) break;

    DenseVector next = step(sys, history, mode, f, u);
    traj.states.push_back(next);
    for (std::size_t j = l; j > 0; --j) history[j] = std::move(history[j - 1]);
    history[0] = std::move(next);
  }
  return traj;
}

DecreaseReport monitor_decrease(const Trajectory& traj, const Certificate& cert,
                                const Nonlinearity& f) {
  if (!traj.v_values.has_value()) {
    throw std::invalid_argument("monitor_decrease: trajectory has no recorded functional values");
  }
  const auto& v = *traj.v_values;
  const std::size_t l = traj.delay;
  (void)cert;

  DecreaseReport report;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    double denom = 0.0;
    for (std::size_t j = 0; j <= l; ++j) {
      const DenseVector& x = traj.state_at(static_cast<long>(k) - static_cast<long>(j));
      for (double xi : x) {
        const double fx = f(xi);
        denom += fx * fx;
      }
    }
    if (denom < 1e-290) continue;  // fully decayed; vacuous step
    const double ratio = (v[k + 1] - v[k]) / denom;
    ++report.steps_evaluated;
    if (!report.max_ratio || ratio > *report.max_ratio) report.max_ratio = ratio;
    if (ratio > -1e-12) ++report.violations;
  }
  return report;
}

namespace {

std::vector<std::vector<DenseVector>> initial_batch(std::size_t n, std::size_t l, double bound,
                                                    std::uint64_t seed) {
  // Histories are stacked vectors of dimension (l+1)*n with norm <= bound.
  std::vector<std::vector<DenseVector>> batch;
  const std::size_t stacked = (l + 1) * n;

  auto from_flat = [&](const DenseVector& flat) {
    std::vector<DenseVector> history(l + 1, DenseVector(n, 0.0));
    for (std::size_t j = 0; j <= l; ++j)
      for (std::size_t i = 0; i < n; ++i) history[j][i] = flat[j * n + i];
    return history;
  };

  for (std::size_t a = 0; a < stacked; ++a) {  // axis corners
    DenseVector flat(stacked, 0.0);
    flat[a] = bound;
    batch.push_back(from_flat(flat));
  }
  DenseVector uniform(stacked, bound / std::sqrt(static_cast<double>(stacked)));
  batch.push_back(from_flat(uniform));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int r = 0; r < 8; ++r) {  // random nonnegative corners scaled to the bound
    DenseVector flat(stacked, 0.0);
    for (double& x : flat) x = dist(rng);
    const double nrm = norm2(flat);
    if (nrm > 0.0)
      for (double& x : flat) x *= bound / nrm;
    batch.push_back(from_flat(flat));
  }
  return batch;
}

}  // namespace

UltimateBoundednessReport probe_ultimate_bound(const SwitchedDelaySystem& sys,
                                               const Nonlinearity& f, const InputSignal& input,
                                               const SwitchingSignal& signal, double initial_bound,
                                               std::size_t horizon, const Certificate* cert) {
  if (!(initial_bound > 0.0)) {
    throw std::invalid_argument("probe_ultimate_bound: initial bound must be positive");
  }
  if (horizon < 10) throw std::invalid_argument("probe_ultimate_bound: horizon too short");

  UltimateBoundednessReport report;
  report.initial_bound = initial_bound;
  if (sys.model_kind() != ModelKind::network) {
    report.note = "model kind is not network; ";
  }
  if (!f.radially_unbounded()) {
    report.note += "nonlinearity is not radially unbounded, the boundedness guarantee "
                   "does not apply; ";
  }

  const auto batch = initial_batch(sys.dim(), sys.delay(), initial_bound, 17);
  report.batch_size = batch.size();
  const std::size_t tail_start = horizon - horizon / 5;  // last 20%

  std::vector<std::vector<double>> norms_per_run;
  double sxx = 0.0, sx1 = 0.0, s11 = 0.0, sxy = 0.0, s1y = 0.0;  // LS accumulators
  bool any_fit = false;

  for (const auto& init : batch) {
    Trajectory traj = simulate(sys, f, signal, input, init, horizon, cert);
    std::vector<double> norms(horizon + 1, 0.0);
    for (std::size_t k = 0; k <= horizon; ++k) {
      norms[k] = norm2(traj.state_at(static_cast<long>(k)));
      if (norms[k] > 1e12) {
        report.diverged = true;
        report.divergence_step = k;
        report.r_emp = std::numeric_limits<double>::infinity();
        report.note += "trajectory norm exceeded 1e12";
        return report;
      }
    }
    if (cert != nullptr) {
      const auto& v = *traj.v_values;
      for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        double energy = 0.0;
        for (std::size_t j = 0; j <= sys.delay(); ++j) {
          const DenseVector& x = traj.state_at(static_cast<long>(k) - static_cast<long>(j));
          for (double xi : x) {
            const double fx = f(xi);
            energy += fx * fx;
          }
        }
        const double dv = v[k + 1] - v[k];
        sxx += energy * energy;
        sx1 += energy;
        s11 += 1.0;
        sxy += energy * dv;
        s1y += dv;
        any_fit = true;
      }
    }
    norms_per_run.push_back(std::move(norms));
  }

  double r_emp = 0.0;
  for (const auto& norms : norms_per_run) {
    for (std::size_t k = tail_start; k <= horizon; ++k) r_emp = std::max(r_emp, norms[k]);
  }
  report.r_emp = r_emp;

  std::size_t k_tilde = 0;
  const double admit = r_emp * (1.0 + 1e-9);
  for (const auto& norms : norms_per_run) {
    std::size_t entry = horizon + 1;
    for (std::size_t k = 0; k <= horizon; ++k) {
      if (norms[k] <= admit) {
        if (entry == horizon + 1) entry = k;
      } else {
        entry = horizon + 1;
      }
    }
    if (entry == horizon + 1) entry = horizon;
    k_tilde = std::max(k_tilde, entry);
  }
  report.k_tilde = k_tilde;

  if (any_fit) {
    // dV ~ -beta1 * energy + beta2 by least squares.
    const double det = sxx * s11 - sx1 * sx1;
    if (std::fabs(det) > 1e-30) {
      const double slope = (sxy * s11 - sx1 * s1y) / det;
      const double intercept = (sxx * s1y - sx1 * sxy) / det;
      report.beta1_emp = -slope;
      report.beta2_emp = intercept;
    }
  } else if (cert == nullptr) {
    report.note += "no certificate attached, decrease-fit constants not estimated";
  }
  return report;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "k,sigma";
  for (std::size_t i = 1; i <= traj.n; ++i) out += ",x" + std::to_string(i);
  out += ",V\n";
  char buf[64];
  for (std::size_t idx = 0; idx < traj.states.size(); ++idx) {
    const long k = static_cast<long>(idx) - static_cast<long>(traj.delay);
    out += std::to_string(k);
    if (k >= 0 && static_cast<std::size_t>(k) < traj.modes.size()) {
      out += "," + std::to_string(traj.modes[static_cast<std::size_t>(k)] + 1);
    } else {
      out += ",";
    }
    for (double x : traj.states[idx]) {
      std::snprintf(buf, sizeof(buf), ",%.17g", x);
      out += buf;
    }
    if (traj.v_values && k >= 0 && static_cast<std::size_t>(k) < traj.v_values->size()) {
      std::snprintf(buf, sizeof(buf), ",%.17g", (*traj.v_values)[static_cast<std::size_t>(k)]);
      out += buf;
    } else {
      out += ",";
    }
    out += "\n";
  }
  return out;
}

}  // namespace diagstab
