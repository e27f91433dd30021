#include "diagstab/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "diagstab/errors.hpp"

namespace diagstab {

using json = nlohmann::ordered_json;

namespace {

json matrix_to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const DenseVector& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

DenseVector vector_from_json(const json& j, const std::string& label) {
  if (!j.is_array() || j.empty()) throw InputError(label + " must be a non-empty array");
  DenseVector v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw InputError(label + "[" + std::to_string(i) + "] is not a number");
    }
    v.push_back(j[i].get<double>());
  }
  return v;
}

// Parses one n x n matrix, reporting the path of any malformed or negative
// entry, e.g. "A[1][0][2]".
DenseMatrix matrix_from_json(const json& j, std::size_t n, const std::string& label) {
  if (!j.is_array() || j.size() != n) {
    throw InputError(label + " must be an array of " + std::to_string(n) + " rows");
  }
  std::vector<std::vector<double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != n) {
      throw InputError(label + "[" + std::to_string(i) + "] must hold " + std::to_string(n) +
                       " entries");
    }
    for (std::size_t k = 0; k < n; ++k) {
      const std::string at = label + "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
      if (!row[k].is_number()) throw InputError(at + " is not a number");
      const double x = row[k].get<double>();
      if (!std::isfinite(x)) throw InputError(at + " is not finite");
      if (x < 0.0) throw InputError(at + " = " + std::to_string(x) + " is negative");
      rows[i].push_back(x);
    }
  }
  return DenseMatrix::from_rows(rows);
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

std::size_t require_positive_int(const json& doc, const char* field) {
  if (!doc.contains(field) || !doc[field].is_number_integer() || doc[field].get<long>() < 1) {
    throw InputError(std::string("field '") + field + "' must be a positive integer");
  }
  return doc[field].get<std::size_t>();
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
}

SwitchedDelaySystem parse_system_text(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw InputError("system document must be a JSON object");
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != kSchemaVersion) {
    throw InputError("field 'schema_version' must equal " + std::to_string(kSchemaVersion));
  }
  const std::size_t n = require_positive_int(doc, "n");
  const std::size_t num_modes = require_positive_int(doc, "N");
  const std::size_t l = require_positive_int(doc, "l");
  if (!doc.contains("model") || !doc["model"].is_string()) {
    throw InputError("field 'model' must be a string");
  }
  const ModelKind kind = model_kind_from_string(doc["model"].get<std::string>());

  if (!doc.contains("A") || !doc["A"].is_array() || doc["A"].size() != num_modes) {
    throw InputError("field 'A' must be an array of N matrices");
  }
  std::vector<DenseMatrix> a;
  for (std::size_t s = 0; s < num_modes; ++s) {
    a.push_back(matrix_from_json(doc["A"][s], n, "A[" + std::to_string(s) + "]"));
  }

  if (!doc.contains("B") || !doc["B"].is_array() || doc["B"].empty()) {
    throw InputError("field 'B' must be a non-empty array");
  }
  const json& bdoc = doc["B"];
  // Single-delay documents hold N matrices (depth 3); multi-delay documents
  // hold l arrays of N matrices (depth 4).
  const bool multi = bdoc[0].is_array() && !bdoc[0].empty() && bdoc[0][0].is_array() &&
                     !bdoc[0][0].empty() && bdoc[0][0][0].is_array();

  SwitchedDelaySystem sys = [&] {
    if (multi) {
      if (bdoc.size() != l) {
        throw InputError("multi-delay field 'B' must hold l = " + std::to_string(l) +
                         " delay groups");
      }
      std::vector<std::vector<DenseMatrix>> blocks(l);
      for (std::size_t m = 0; m < l; ++m) {
        if (!bdoc[m].is_array() || bdoc[m].size() != num_modes) {
          throw InputError("B[" + std::to_string(m) + "] must hold N matrices");
        }
        for (std::size_t s = 0; s < num_modes; ++s) {
          blocks[m].push_back(matrix_from_json(
              bdoc[m][s], n, "B[" + std::to_string(m) + "][" + std::to_string(s) + "]"));
        }
      }
      return SwitchedDelaySystem::multi_delay(std::move(a), std::move(blocks), kind);
    }
    if (bdoc.size() != num_modes) {
      throw InputError("single-delay field 'B' must hold N matrices");
    }
    std::vector<DenseMatrix> b;
    for (std::size_t s = 0; s < num_modes; ++s) {
      b.push_back(matrix_from_json(bdoc[s], n, "B[" + std::to_string(s) + "]"));
    }
    return SwitchedDelaySystem::single_delay(std::move(a), std::move(b), l, kind);
  }();

  if (doc.contains("name") && doc["name"].is_string()) sys.name = doc["name"].get<std::string>();
  return sys;
}

SwitchedDelaySystem parse_system(const std::string& path) {
  try {
    return parse_system_text(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string serialize_system(const SwitchedDelaySystem& sys) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  if (!sys.name.empty()) doc["name"] = sys.name;
  doc["model"] = to_string(sys.model_kind());
  doc["n"] = sys.dim();
  doc["N"] = sys.num_modes();
  doc["l"] = sys.delay();
  json a = json::array();
  for (std::size_t s = 0; s < sys.num_modes(); ++s) a.push_back(matrix_to_json(sys.a(s)));
  doc["A"] = std::move(a);
  if (sys.single_delay_structure()) {
    json b = json::array();
    for (std::size_t s = 0; s < sys.num_modes(); ++s) b.push_back(matrix_to_json(sys.b_last(s)));
    doc["B"] = std::move(b);
  } else {
    json b = json::array();
    for (std::size_t m = 0; m < sys.delay(); ++m) {
      json group = json::array();
      for (std::size_t s = 0; s < sys.num_modes(); ++s) {
        group.push_back(matrix_to_json(sys.b(m, s)));
      }
      b.push_back(std::move(group));
    }
    doc["B"] = std::move(b);
  }
  return doc.dump(2) + "\n";
}

namespace {

json family_to_json(const std::vector<DenseVector>& family) {
  json out = json::array();
  for (const auto& v : family) out.push_back(vector_to_json(v));
  return out;
}

std::vector<DenseVector> family_from_json(const json& j, const std::string& label) {
  if (!j.is_array() || j.empty()) throw InputError(label + " must be a non-empty array");
  std::vector<DenseVector> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(vector_from_json(j[i], label + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json certificate_to_json(const Certificate& cert) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  std::visit(
      [&doc](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CommonDiagonalCertificate>) {
          doc["kind"] = "common";
          doc["functional_form"] = to_string(c.form);
          doc["l"] = c.delay;
          doc["P"] = vector_to_json(c.p_diag);
          doc["Q"] = vector_to_json(c.q_diag);
          doc["epsilon"] = c.epsilon;
          doc["delta"] = c.delta;
          doc["d"] = vector_to_json(c.d);
          doc["theta"] = vector_to_json(c.theta);
          doc["mu"] = c.mu;
          doc["lambda"] = c.lambda;
          if (c.extended_construction) doc["extended_construction"] = true;
        } else if constexpr (std::is_same_v<T, SwitchedDiagonalCertificate>) {
          doc["kind"] = "switched";
          doc["functional_form"] = to_string(c.form);
          doc["l"] = c.delay;
          doc["P_family"] = family_to_json(c.p_diags);
          doc["Q_tilde"] = vector_to_json(c.q_tilde_diag);
          doc["epsilon"] = c.epsilon;
          doc["delta"] = c.delta;
          doc["d_family"] = family_to_json(c.d_family);
          doc["theta"] = vector_to_json(c.theta);
          doc["mu"] = c.mu;
          doc["lambda"] = c.lambda;
        } else {
          doc["kind"] = "switched_l1";
          doc["functional_form"] = to_string(c.form);
          doc["l"] = 1;
          doc["P_family"] = family_to_json(c.p_diags);
          doc["Q_family"] = family_to_json(c.q_diags);
          doc["delta"] = c.delta;
          doc["d_family"] = family_to_json(c.d_family);
          doc["theta"] = vector_to_json(c.theta);
          doc["mu"] = c.mu;
          doc["lambda"] = c.lambda;
        }
      },
      cert);
  return doc;
}

double require_number(const json& doc, const char* field) {
  if (!doc.contains(field) || !doc[field].is_number()) {
    throw InputError(std::string("certificate field '") + field + "' must be a number");
  }
  return doc[field].get<double>();
}

Certificate certificate_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    throw InputError("certificate document must be an object with a 'kind' field");
  }
  const std::string kind = doc["kind"].get<std::string>();
  const FunctionalForm form =
      functional_form_from_string(doc.value("functional_form", std::string("eq5")));
  if (kind == "common") {
    CommonDiagonalCertificate c;
    c.form = form;
    c.delay = doc.value("l", 1);
    c.p_diag = vector_from_json(doc.at("P"), "P");
    c.q_diag = vector_from_json(doc.at("Q"), "Q");
    c.epsilon = require_number(doc, "epsilon");
    c.delta = require_number(doc, "delta");
    c.d = vector_from_json(doc.at("d"), "d");
    c.theta = vector_from_json(doc.at("theta"), "theta");
    c.mu = require_number(doc, "mu");
    c.lambda = require_number(doc, "lambda");
    c.extended_construction = doc.value("extended_construction", false);
    return c;
  }
  if (kind == "switched") {
    SwitchedDiagonalCertificate c;
    c.form = form;
    c.delay = doc.value("l", 1);
    c.p_diags = family_from_json(doc.at("P_family"), "P_family");
    c.q_tilde_diag = vector_from_json(doc.at("Q_tilde"), "Q_tilde");
    c.epsilon = require_number(doc, "epsilon");
    c.delta = require_number(doc, "delta");
    c.d_family = family_from_json(doc.at("d_family"), "d_family");
    c.theta = vector_from_json(doc.at("theta"), "theta");
    c.mu = require_number(doc, "mu");
    c.lambda = require_number(doc, "lambda");
    return c;
  }
  if (kind == "switched_l1") {
    SwitchedL1Certificate c;
    c.form = form;
    c.p_diags = family_from_json(doc.at("P_family"), "P_family");
    c.q_diags = family_from_json(doc.at("Q_family"), "Q_family");
    c.delta = require_number(doc, "delta");
    c.d_family = family_from_json(doc.at("d_family"), "d_family");
    c.theta = vector_from_json(doc.at("theta"), "theta");
    c.mu = require_number(doc, "mu");
    c.lambda = require_number(doc, "lambda");
    return c;
  }
  throw InputError("unknown certificate kind '" + kind + "'");
}

json witness_to_json(const ScalingWitness& w) {
  json doc;
  doc["lambda"] = w.lambda;
  doc["v"] = vector_to_json(w.v);
  doc["slack"] = w.slack;
  return doc;
}

json coupled_witness_to_json(const CoupledWitness& w) {
  json doc;
  doc["mu"] = w.mu;
  doc["d_family"] = family_to_json(w.d_family);
  doc["slack"] = w.slack;
  return doc;
}

json outcome_to_json(const TheoremOutcome& out) {
  json doc;
  doc["theorem"] = to_string(out.id);
  doc["status"] = to_string(out.status);
  if (!out.numbers.empty()) {
    json nums;
    for (const auto& [k, v] : out.numbers) nums[k] = v;
    doc["numbers"] = std::move(nums);
  }
  if (out.d_witness) doc["d_witness"] = witness_to_json(*out.d_witness);
  if (out.theta_witness) doc["theta_witness"] = witness_to_json(*out.theta_witness);
  if (out.coupled_witness) doc["coupled_witness"] = coupled_witness_to_json(*out.coupled_witness);
  if (!out.note.empty()) doc["note"] = out.note;
  return doc;
}

}  // namespace

Certificate parse_certificate_text(const std::string& text) {
  return certificate_from_json(parse_json(text));
}

Certificate parse_certificate(const std::string& path) {
  try {
    return parse_certificate_text(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string serialize_certificate(const Certificate& cert) {
  return certificate_to_json(cert).dump(2) + "\n";
}

std::string serialize_report(const AnalysisReport& report, bool canonical) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  if (!canonical) doc["generated_at"] = timestamp_utc();
  doc["tolerance"] = report.tol;
  json sys;
  if (!report.system_name.empty()) sys["name"] = report.system_name;
  sys["model"] = to_string(report.model);
  sys["n"] = report.n;
  sys["N"] = report.num_modes;
  sys["l"] = report.delay;
  doc["system"] = std::move(sys);
  json outcomes = json::array();
  for (const auto& out : report.outcomes) outcomes.push_back(outcome_to_json(out));
  doc["outcomes"] = std::move(outcomes);
  doc["strongest_conclusion"] = report.strongest_conclusion;
  return doc.dump(2) + "\n";
}

std::string serialize_certificate_bundle(const SwitchedDelaySystem& sys,
                                         const std::vector<Certificate>& certs, double tol,
                                         bool canonical) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  if (!canonical) doc["generated_at"] = timestamp_utc();
  doc["tolerance"] = tol;
  json s;
  if (!sys.name.empty()) s["name"] = sys.name;
  s["model"] = to_string(sys.model_kind());
  s["n"] = sys.dim();
  s["N"] = sys.num_modes();
  s["l"] = sys.delay();
  doc["system"] = std::move(s);
  json arr = json::array();
  for (const auto& c : certs) arr.push_back(certificate_to_json(c));
  doc["certificates"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::vector<Certificate> parse_certificate_bundle_text(const std::string& text) {
  const json doc = parse_json(text);
  std::vector<Certificate> certs;
  if (doc.is_object() && doc.contains("certificates")) {
    for (const auto& c : doc["certificates"]) certs.push_back(certificate_from_json(c));
  } else {
    certs.push_back(certificate_from_json(doc));
  }
  return certs;
}

}  // namespace diagstab
