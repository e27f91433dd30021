#pragma once

#include <string>

#include "diagstab/analyzer.hpp"
#include "diagstab/certificate.hpp"
#include "diagstab/system.hpp"

namespace diagstab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolName = "diagstab";
inline constexpr const char* kToolVersion = "0.1.0";

/// System documents. Field layout:
///   schema_version, model, n, N, l, A (N row-major n x n arrays),
///   B (N arrays for a single delay block, or l arrays of N arrays),
///   optional name/source metadata.
/// Validation failures raise InputError naming the offending field/index.
SwitchedDelaySystem parse_system_text(const std::string& text);
SwitchedDelaySystem parse_system(const std::string& path);
std::string serialize_system(const SwitchedDelaySystem& sys);

/// Certificate documents (kind-tagged; carries the generating witness so a
/// certificate re-verifies standalone).
Certificate parse_certificate_text(const std::string& text);
Certificate parse_certificate(const std::string& path);
std::string serialize_certificate(const Certificate& cert);

/// Analysis report document. Canonical mode omits the timestamp so identical
/// invocations serialize byte-identically.
std::string serialize_report(const AnalysisReport& report, bool canonical);

/// Bundle of every certificate synthesized for a system.
std::string serialize_certificate_bundle(const SwitchedDelaySystem& sys,
                                         const std::vector<Certificate>& certs, double tol,
                                         bool canonical);
std::vector<Certificate> parse_certificate_bundle_text(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace diagstab
