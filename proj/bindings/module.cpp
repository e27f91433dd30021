#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagstab/analyzer.hpp"
#include "diagstab/certificate.hpp"
#include "diagstab/errors.hpp"
#include "diagstab/io.hpp"
#include "diagstab/simulator.hpp"

namespace py = pybind11;
using namespace diagstab;
using json = nlohmann::ordered_json;

namespace {

DenseMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  return DenseMatrix::from_rows(rows);
}

MatrixSet set_from_lists(const std::vector<std::vector<std::vector<double>>>& mats) {
  std::vector<DenseMatrix> members;
  members.reserve(mats.size());
  for (const auto& rows : mats) members.push_back(matrix_from_rows(rows));
  return MatrixSet(std::move(members));
}

std::vector<Certificate> certificates_for(const SwitchedDelaySystem& sys,
                                          const AnalysisReport& report) {
  std::vector<Certificate> certs;
  auto find = [&](TheoremId id) -> const TheoremOutcome* {
    for (const auto& out : report.outcomes)
      if (out.id == id) return &out;
    return nullptr;
  };
  if (const auto* t4 = find(TheoremId::T4);
      t4 != nullptr && t4->status == TheoremStatus::holds) {
    certs.push_back(synthesize_common(sys, t4->d_witness->v, t4->theta_witness->v,
                                      t4->numbers.at("mu"), t4->numbers.at("lambda")));
  } else if (const auto* t6 = find(TheoremId::T6);
             t6 != nullptr && t6->status == TheoremStatus::holds) {
    certs.push_back(synthesize_common(sys, t6->d_witness->v, t6->theta_witness->v,
                                      t6->numbers.at("mu"), t6->numbers.at("lambda")));
  }
  if (sys.single_delay_structure()) {
    if (const auto* t7 = find(TheoremId::T7);
        t7 != nullptr && t7->status == TheoremStatus::holds) {
      certs.push_back(synthesize_switched(sys, t7->coupled_witness->d_family,
                                          t7->theta_witness->v, t7->numbers.at("mu"),
                                          t7->numbers.at("lambda")));
    }
  }
  if (sys.delay() == 1) {
    if (const auto* p4 = find(TheoremId::P4);
        p4 != nullptr && p4->status == TheoremStatus::holds) {
      certs.push_back(synthesize_switched_l1(sys, p4->coupled_witness->d_family,
                                             p4->theta_witness->v, p4->numbers.at("mu"),
                                             p4->numbers.at("lambda")));
    }
  }
  return certs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "diagonal stability analysis for discrete-time positive switched systems with delay";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("version", [] { return std::string(kToolVersion); });

  m.def(
      "benchmark_system_json",
      [](double a, const std::string& model) {
        return serialize_system(benchmark_system(a, model_kind_from_string(model)));
      },
      py::arg("a"), py::arg("model") = "persidskii",
      "Two-mode benchmark family as a system document");

  m.def(
      "analyze_json",
      [](const std::string& system_json, double tol) {
        return serialize_report(analyze_all(parse_system_text(system_json), tol), true);
      },
      py::arg("system_json"), py::arg("tol") = 1e-9,
      "Run every applicable checker; returns the report document");

  m.def(
      "certify_json",
      [](const std::string& system_json, double tol) {
        const auto sys = parse_system_text(system_json);
        const auto report = analyze_all(sys, tol);
        return serialize_certificate_bundle(sys, certificates_for(sys, report), tol, true);
      },
      py::arg("system_json"), py::arg("tol") = 1e-9,
      "Synthesize certificates for every checker that holds");

  m.def(
      "verify_json",
      [](const std::string& cert_json, const std::string& system_json) {
        const auto sys = parse_system_text(system_json);
        const auto certs = parse_certificate_bundle_text(cert_json);
        json out;
        out["certificates"] = json::array();
        bool all_ok = !certs.empty();
        for (const auto& cert : certs) {
          const VerificationReport report = verify_certificate(sys, cert);
          json entry;
          entry["functional_form"] = to_string(certificate_form(cert));
          entry["accepted"] = report.accepted;
          entry["beta"] = report.beta;
          entry["worst_margin"] = report.worst_margin;
          json margins = json::array();
          for (const auto& margin : report.margins) {
            margins.push_back({{"s", margin.s + 1},
                               {"r", margin.r + 1},
                               {"largest_eigenvalue", margin.largest_eigenvalue},
                               {"metzler_ok", margin.metzler_ok}});
          }
          entry["margins"] = std::move(margins);
          out["certificates"].push_back(std::move(entry));
          all_ok = all_ok && report.accepted;
        }
        out["accepted"] = all_ok;
        return out.dump(2) + "\n";
      },
      py::arg("certificate_json"), py::arg("system_json"),
      "Re-check certificates against a system document");

  m.def(
      "spectral_json",
      [](const std::string& system_json, double tol) {
        const auto sys = parse_system_text(system_json);
        const SpectralAnalysis spectral = spectral_report(sys, tol);
        auto selection = [](const SelectionReport& r) {
          json doc;
          doc["rho_max"] = r.rho_max;
          json arg = json::array();
          for (std::size_t member : r.argmax) arg.push_back(member + 1);
          doc["argmax"] = std::move(arg);
          doc["count"] = r.count;
          return doc;
        };
        json out;
        out["m1"] = selection(spectral.m1_report);
        out["m2"] = selection(spectral.m2_report);
        out["product"] = spectral.m1_report.rho_max * spectral.m2_report.rho_max;
        return out.dump(2) + "\n";
      },
      py::arg("system_json"), py::arg("tol") = 1e-9,
      "Row-selection spectral radii of both matrix families");

  m.def(
      "simulate_csv",
      [](const std::string& system_json, std::size_t steps, std::uint64_t seed,
         const std::string& f, const std::string& switching, const std::string& input,
         const std::string& cert_json, const std::vector<double>& init) {
        const auto sys = parse_system_text(system_json);
        const Nonlinearity nonlin = Nonlinearity::from_string(f);
        const SwitchingSignal signal =
            SwitchingSignal::from_string(switching, seed, sys.num_modes());
        const InputSignal in = InputSignal::from_string(input, seed + 1, sys.dim());
        std::optional<Certificate> cert;
        if (!cert_json.empty()) {
          auto certs = parse_certificate_bundle_text(cert_json);
          if (certs.empty()) throw InputError("certificate document holds no certificates");
          cert = certs.front();
        }
        DenseVector start(sys.dim(), 1.0);
        if (!init.empty()) {
          if (init.size() != sys.dim()) throw InputError("initial state needs n values");
          start = init;
        }
        const std::vector<DenseVector> history(sys.delay() + 1, start);
        const Trajectory traj =
            simulate(sys, nonlin, signal, in, history, steps, cert ? &*cert : nullptr);
        return trajectory_csv(traj);
      },
      py::arg("system_json"), py::arg("steps") = 100, py::arg("seed") = 0,
      py::arg("f") = "identity", py::arg("switching") = "random", py::arg("input") = "zero",
      py::arg("certificate_json") = "", py::arg("init") = std::vector<double>{},
      "Simulate and return the trajectory as CSV text");

  m.def(
      "spectral_radius",
      [](const std::vector<std::vector<double>>& rows, double tol) {
        return spectral_radius(matrix_from_rows(rows), tol);
      },
      py::arg("matrix"), py::arg("tol") = 1e-10,
      "Spectral radius of a nonnegative square matrix");

  m.def(
      "minimal_scaling",
      [](const std::vector<std::vector<std::vector<double>>>& members, double tol) {
        const auto [lambda, witness] = minimal_scaling(set_from_lists(members), tol);
        return py::make_tuple(lambda, witness.v, witness.slack);
      },
      py::arg("members"), py::arg("tol") = 1e-9,
      "Smallest strictly feasible scaling with its witness (lambda, v, slack)");

  m.def(
      "row_selection",
      [](const std::vector<std::vector<std::vector<double>>>& members) {
        const SelectionReport report = row_selection_report(set_from_lists(members));
        std::vector<std::size_t> argmax;
        for (std::size_t member : report.argmax) argmax.push_back(member + 1);
        return py::make_tuple(report.rho_max, argmax, report.count);
      },
      py::arg("members"),
      "Exhaustive row-selection maximum: (rho_max, 1-based argmax, count)");
}
