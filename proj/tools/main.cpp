#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diagstab/analyzer.hpp"
#include "diagstab/certificate.hpp"
#include "diagstab/errors.hpp"
#include "diagstab/io.hpp"
#include "diagstab/simulator.hpp"

namespace {

using namespace diagstab;

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Options {
  double tol = 1e-9;
  bool canonical = false;
  std::string report_path;
  std::string system_path;
  std::string cert_path;
  std::string out_path;
  // simulate
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  std::string f_spec = "identity";
  std::string switching_spec = "random";
  std::string input_spec = "zero";
  std::string init_spec;
  // paper-example
  double a = 2.0;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

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

const TheoremOutcome* find_outcome(const AnalysisReport& report, TheoremId id) {
  for (const auto& out : report.outcomes)
    if (out.id == id) return &out;
  return nullptr;
}

int run_analyze(const Options& opt) {
  const auto sys = parse_system(opt.system_path);
  const AnalysisReport report = analyze_all(sys, opt.tol);
  emit(serialize_report(report, opt.canonical), opt.report_path);
  if (!opt.report_path.empty()) {
    std::cout << "strongest conclusion: " << report.strongest_conclusion << "\n";
  }
  return report.strongest_conclusion == kConclusionUndecided ? kExitFails : kExitHolds;
}

std::vector<Certificate> synthesize_all(const SwitchedDelaySystem& sys,
                                        const AnalysisReport& report) {
  std::vector<Certificate> certs;
  if (const auto* t4 = find_outcome(report, TheoremId::T4);
      t4 != nullptr && t4->status == TheoremStatus::holds) {
    certs.push_back(synthesize_common(sys, t4->d_witness->v, t4->theta_witness->v,
                                      t4->numbers.at("mu"), t4->numbers.at("lambda")));
  } else if (const auto* t6 = find_outcome(report, TheoremId::T6);
             t6 != nullptr && t6->status == TheoremStatus::holds) {
    certs.push_back(synthesize_common(sys, t6->d_witness->v, t6->theta_witness->v,
                                      t6->numbers.at("mu"), t6->numbers.at("lambda")));
  }
  if (sys.single_delay_structure()) {
    if (const auto* t7 = find_outcome(report, TheoremId::T7);
        t7 != nullptr && t7->status == TheoremStatus::holds) {
      certs.push_back(synthesize_switched(sys, t7->coupled_witness->d_family,
                                          t7->theta_witness->v, t7->numbers.at("mu"),
                                          t7->numbers.at("lambda")));
    }
  }
  if (sys.delay() == 1) {
    if (const auto* p4 = find_outcome(report, TheoremId::P4);
        p4 != nullptr && p4->status == TheoremStatus::holds) {
      certs.push_back(synthesize_switched_l1(sys, p4->coupled_witness->d_family,
                                             p4->theta_witness->v, p4->numbers.at("mu"),
                                             p4->numbers.at("lambda")));
    }
  }
  return certs;
}

int run_certify(const Options& opt) {
  const auto sys = parse_system(opt.system_path);
  const AnalysisReport report = analyze_all(sys, opt.tol);
  const std::vector<Certificate> certs = synthesize_all(sys, report);
  emit(serialize_certificate_bundle(sys, certs, opt.tol, opt.canonical), opt.report_path);
  if (!opt.report_path.empty()) {
    std::cout << certs.size() << " certificate(s) synthesized\n";
  }
  return certs.empty() ? kExitFails : kExitHolds;
}

int run_verify(const Options& opt) {
  const auto sys = parse_system(opt.system_path);
  const auto certs = parse_certificate_bundle_text(read_file(opt.cert_path));
  if (certs.empty()) throw InputError("certificate document holds no certificates");
  bool all_ok = true;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const VerificationReport report = verify_certificate(sys, certs[i]);
    std::printf("certificate %zu (%s): %s, worst margin %.6g, beta %.6g\n", i + 1,
                to_string(certificate_form(certs[i])).c_str(),
                report.accepted ? "accepted" : "REJECTED", report.worst_margin, report.beta);
    if (!report.accepted) {
      for (const auto& m : report.margins) {
        if (m.largest_eigenvalue >= 0.0) {
          std::printf("  block (s=%zu, r=%zu): largest eigenvalue %.6g is not negative\n",
                      m.s + 1, m.r + 1, m.largest_eigenvalue);
        }
        if (!m.metzler_ok) {
          std::printf("  block (s=%zu, r=%zu): theta-stacked negativity witness fails\n",
                      m.s + 1, m.r + 1);
        }
      }
      all_ok = false;
    }
  }
  return all_ok ? kExitHolds : kExitFails;
}

int run_simulate(const Options& opt) {
  const auto sys = parse_system(opt.system_path);
  const Nonlinearity f = Nonlinearity::from_string(opt.f_spec);
  const SwitchingSignal signal =
      SwitchingSignal::from_string(opt.switching_spec, opt.seed, sys.num_modes());
  const InputSignal input = InputSignal::from_string(opt.input_spec, opt.seed + 1, sys.dim());

  std::optional<Certificate> cert;
  if (!opt.cert_path.empty()) {
    auto certs = parse_certificate_bundle_text(read_file(opt.cert_path));
    if (certs.empty()) throw InputError("certificate document holds no certificates");
    cert = certs.front();
  }

  DenseVector start(sys.dim(), 1.0);
  if (!opt.init_spec.empty()) {
    start = parse_number_list(opt.init_spec, "initial state");
    if (start.size() != sys.dim()) throw InputError("initial state needs n values");
  }
  const std::vector<DenseVector> init(sys.delay() + 1, start);

  const Trajectory traj =
      simulate(sys, f, signal, input, init, opt.steps, cert ? &*cert : nullptr);
  emit(trajectory_csv(traj), opt.out_path);
  return kExitHolds;
}

int run_spectral(const Options& opt) {
  const auto sys = parse_system(opt.system_path);
  const SpectralAnalysis spectral = spectral_report(sys, opt.tol);
  auto print_selection = [](const char* label, const SelectionReport& report) {
    std::printf("%s = %.12f over %zu selections, argmax rows from members (", label,
                report.rho_max, report.count);
    for (std::size_t i = 0; i < report.argmax.size(); ++i) {
      std::printf("%s%zu", i == 0 ? "" : ", ", report.argmax[i] + 1);
    }
    std::printf(")\n");
  };
  print_selection("rho1", spectral.m1_report);
  print_selection("rho2", spectral.m2_report);
  const double product = spectral.m1_report.rho_max * spectral.m2_report.rho_max;
  std::printf("product = %.12f (%s)\n", product, product < 1.0 - opt.tol ? "< 1" : ">= 1");
  return spectral.t5.status == TheoremStatus::holds ? kExitHolds : kExitFails;
}

int run_paper_example(const Options& opt) {
  const auto sys = benchmark_system(opt.a);
  const AnalysisReport report = analyze_all(sys, opt.tol);

  std::printf("two-mode benchmark family at a = %.6g (n = 2, l = 1)\n", opt.a);
  const auto* t4 = find_outcome(report, TheoremId::T4);
  const auto* t2 = find_outcome(report, TheoremId::T2);
  const auto* p4 = find_outcome(report, TheoremId::P4);
  const auto* t5 = find_outcome(report, TheoremId::T5);

  auto closed_form = [&](const std::string& which) -> std::string {
    // Exact closed forms at the two special parameter values.
    if (std::fabs(opt.a - 2.0) < 1e-12) {
      return which == "lambda" ? "  [(1+sqrt(6))/4]" : "  [(2+sqrt(6))/4]";
    }
    if (std::fabs(opt.a - 2.25) < 1e-12) {
      return which == "lambda" ? "  [(13+sqrt(217))/32]" : "  [(17+sqrt(385))/32]";
    }
    return "";
  };

  std::printf("scaling-one systems (both strict): %s\n", to_string(t2->status).c_str());
  std::printf("lambda* = %.9f%s\n", t4->numbers.at("lambda"), closed_form("lambda").c_str());
  std::printf("mu*     = %.9f%s\n", t4->numbers.at("mu"), closed_form("mu").c_str());
  std::printf("product = %.9f -> common functional %s\n", t4->numbers.at("product"),
              t4->status == TheoremStatus::holds ? "exists" : "not certified");
  if (t5 != nullptr && !t5->numbers.empty()) {
    std::printf("rho1 = %.9f, rho2 = %.9f, rho1*rho2 = %.9f\n", t5->numbers.at("rho1"),
                t5->numbers.at("rho2"), t5->numbers.at("product"));
  }
  if (p4 != nullptr && p4->status != TheoremStatus::inapplicable) {
    std::printf("coupled (delay-one) mu* = %.9f, product = %.9f -> switched functional %s\n",
                p4->numbers.at("mu"), p4->numbers.at("product"),
                p4->status == TheoremStatus::holds ? "exists" : "not certified");
  }
  std::printf("strongest conclusion: %s\n", report.strongest_conclusion.c_str());
  if (!opt.report_path.empty()) {
    write_file(opt.report_path, serialize_report(report, opt.canonical));
  }
  return report.strongest_conclusion == kConclusionUndecided ? kExitFails : kExitHolds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagonal stability analysis for discrete-time positive switched systems "
               "with delay"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--tol", opt.tol, "numerical tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--canonical", opt.canonical, "omit timestamps from emitted documents");

  auto* analyze = app.add_subcommand("analyze", "run every applicable stability checker");
  analyze->add_option("system", opt.system_path, "system document")->required();
  analyze->add_option("--report", opt.report_path, "write the report document here");

  auto* certify = app.add_subcommand("certify", "synthesize certificates for passing checkers");
  certify->add_option("system", opt.system_path, "system document")->required();
  certify->add_option("--report", opt.report_path, "write the certificate bundle here");

  auto* verify = app.add_subcommand("verify", "re-check a certificate against a system");
  verify->add_option("certificate", opt.cert_path, "certificate document")->required();
  verify->add_option("system", opt.system_path, "system document")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "simulate and export CSV");
  simulate_cmd->add_option("system", opt.system_path, "system document")->required();
  simulate_cmd->add_option("--steps", opt.steps, "number of steps")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", opt.seed, "seed for random switching/input");
  simulate_cmd->add_option("--f", opt.f_spec,
                           "nonlinearity: identity|tanh|saturation|rational|scaled:<c>");
  simulate_cmd->add_option("--switching", opt.switching_spec,
                           "switching: fixed:<s>|periodic:<pat>|random|adversarial");
  simulate_cmd->add_option("--input", opt.input_spec, "input: zero|constant:<v>|random:<amp>");
  simulate_cmd->add_option("--cert", opt.cert_path, "certificate to evaluate along the run");
  simulate_cmd->add_option("--init", opt.init_spec, "initial state (comma-separated)");
  simulate_cmd->add_option("--out", opt.out_path, "write CSV here instead of stdout");

  auto* spectral_cmd = app.add_subcommand("spectral", "row-selection spectral radii");
  spectral_cmd->add_option("system", opt.system_path, "system document")->required();

  auto* paper = app.add_subcommand("paper-example", "analyze the built-in two-mode benchmark");
  paper->add_option("--a", opt.a, "benchmark parameter")->required();
  paper->add_option("--report", opt.report_path, "write the report document here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(opt);
    if (certify->parsed()) return run_certify(opt);
    if (verify->parsed()) return run_verify(opt);
    if (simulate_cmd->parsed()) return run_simulate(opt);
    if (spectral_cmd->parsed()) return run_spectral(opt);
    if (paper->parsed()) return run_paper_example(opt);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const WitnessError& e) {
    std::cerr << "witness rejected: " << e.what() << "\n";
    return kExitFails;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const EnumerationCapError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const LpFailure& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
