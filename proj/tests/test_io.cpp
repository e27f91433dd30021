#include <doctest.h>

#include <cmath>

#include "diagstab/analyzer.hpp"
#include "diagstab/certificate.hpp"
#include "diagstab/errors.hpp"
#include "diagstab/io.hpp"

using namespace diagstab;

TEST_CASE("system document round trip") {
  const auto sys = benchmark_system(2.0);
  const std::string text = serialize_system(sys);
  const auto parsed = parse_system_text(text);
  CHECK(parsed.dim() == 2);
  CHECK(parsed.num_modes() == 2);
  CHECK(parsed.delay() == 1);
  CHECK(parsed.a(0) == sys.a(0));
  CHECK(parsed.b_last(1) == sys.b_last(1));
  // Byte identity: serialize -> parse -> serialize.
  CHECK(serialize_system(parsed) == text);
}

TEST_CASE("system document validation diagnostics") {
  CHECK_THROWS_WITH_AS(parse_system_text("{"), doctest::Contains("malformed JSON"), InputError);
  CHECK_THROWS_WITH_AS(parse_system_text(R"({"schema_version":2})"),
                       doctest::Contains("schema_version"), InputError);

  const std::string negative = R"({
    "schema_version": 1, "model": "persidskii", "n": 2, "N": 1, "l": 1,
    "A": [[[0.1, -0.1], [0.0, 0.1]]],
    "B": [[[0.0, 0.0], [0.0, 0.0]]]
  })";
  CHECK_THROWS_WITH_AS(parse_system_text(negative), doctest::Contains("A[0][0][1]"), InputError);

  const std::string bad_model = R"({
    "schema_version": 1, "model": "hybrid", "n": 1, "N": 1, "l": 1,
    "A": [[[0.1]]], "B": [[[0.1]]]
  })";
  CHECK_THROWS_WITH_AS(parse_system_text(bad_model), doctest::Contains("hybrid"), InputError);

  const std::string ragged = R"({
    "schema_version": 1, "model": "persidskii", "n": 2, "N": 1, "l": 1,
    "A": [[[0.1, 0.0], [0.0]]], "B": [[[0.0, 0.0], [0.0, 0.0]]]
  })";
  CHECK_THROWS_WITH_AS(parse_system_text(ragged), doctest::Contains("A[0][1]"), InputError);
}

TEST_CASE("shipped fixtures parse to the benchmark systems") {
  const auto a2 = parse_system("fixtures/paper_a2.json");
  const auto expected = benchmark_system(2.0);
  CHECK(a2.a(0) == expected.a(0));
  CHECK(a2.a(1) == expected.a(1));
  CHECK(a2.b_last(0) == expected.b_last(0));
  CHECK(a2.b_last(1) == expected.b_last(1));
  CHECK(a2.model_kind() == ModelKind::persidskii);

  const auto a225 = parse_system("fixtures/paper_a225.json");
  CHECK(a225.b_last(0)(0, 0) == doctest::Approx(0.5625));

  const auto multi = parse_system("fixtures/multidelay_l2.json");
  CHECK(multi.delay() == 2);
  CHECK_FALSE(multi.single_delay_structure());
  CHECK(multi.b(0, 1)(0, 1) == doctest::Approx(0.02));

  CHECK_THROWS_AS(parse_system("fixtures/negative_entry.json"), InputError);
  CHECK_THROWS_AS(parse_system("fixtures/nonexistent.json"), InputError);
}

TEST_CASE("certificate documents round trip") {
  const auto sys = benchmark_system(2.0);
  const TheoremOutcome t4 = check_theorem4(sys, 1e-9);
  const Certificate cert = synthesize_common(sys, t4.d_witness->v, t4.theta_witness->v,
                                             t4.numbers.at("mu"), t4.numbers.at("lambda"));
  const std::string text = serialize_certificate(cert);
  const Certificate parsed = parse_certificate_text(text);
  CHECK(serialize_certificate(parsed) == text);  // byte identity through doubles

  // The parsed certificate still verifies.
  CHECK(verify_certificate(sys, parsed).accepted);

  // Switched kinds round trip as well.
  const TheoremOutcome t7 = check_theorem7(sys, 1e-9);
  const Certificate switched = synthesize_switched(
      sys, t7.coupled_witness->d_family, t7.theta_witness->v, t7.numbers.at("mu"),
      t7.numbers.at("lambda"));
  CHECK(serialize_certificate(parse_certificate_text(serialize_certificate(switched))) ==
        serialize_certificate(switched));

  const auto [lambda, theta] = minimal_scaling(m2_set(sys), 1e-9);
  const auto [mu, coupled] = minimal_coupled_scaling(sys, CoupledVariant::prop4, 1e-9);
  const Certificate l1 = synthesize_switched_l1(sys, coupled.d_family, theta.v, mu, lambda);
  const std::string l1_text = serialize_certificate(l1);
  CHECK(serialize_certificate(parse_certificate_text(l1_text)) == l1_text);

  CHECK_THROWS_AS(parse_certificate_text(R"({"kind":"exotic"})"), InputError);
}

TEST_CASE("analysis report serialization is canonical and lossless") {
  const AnalysisReport report = analyze_all(benchmark_system(2.25), 1e-9);
  const std::string text = serialize_report(report, true);
  CHECK(text == serialize_report(report, true));  // deterministic
  CHECK(text.find("generated_at") == std::string::npos);
  CHECK(serialize_report(report, false).find("generated_at") != std::string::npos);
  CHECK(text.find("\"strongest_conclusion\"") != std::string::npos);

  // Gnarly doubles survive a parse/dump cycle byte-identically.
  const std::string cert_text = serialize_certificate(Certificate(CommonDiagonalCertificate{
      {1.0 / 3.0, 0.1},
      {2.0 / 7.0, 1e-17},
      1e-300,
      0.1,
      1,
      FunctionalForm::common_nonlinear,
      {1.0, 1.0},
      {1.0, 1.0},
      0.4,
      0.4,
      false}));
  CHECK(serialize_certificate(parse_certificate_text(cert_text)) == cert_text);
}

TEST_CASE("shipped fixtures round-trip byte-identically after one normalization") {
  for (const char* name : {"fixtures/paper_a2.json", "fixtures/paper_a225.json",
                           "fixtures/multidelay_l2.json"}) {
    const std::string once = serialize_system(parse_system(name));
    CHECK(serialize_system(parse_system_text(once)) == once);
  }
}

TEST_CASE("certificate bundles") {
  const auto sys = benchmark_system(2.0);
  const TheoremOutcome t4 = check_theorem4(sys, 1e-9);
  const Certificate cert = synthesize_common(sys, t4.d_witness->v, t4.theta_witness->v,
                                             t4.numbers.at("mu"), t4.numbers.at("lambda"));
  const std::string bundle = serialize_certificate_bundle(sys, {cert, cert}, 1e-9, true);
  const auto parsed = parse_certificate_bundle_text(bundle);
  CHECK(parsed.size() == 2);
  // A single bare certificate also parses as a bundle of one.
  CHECK(parse_certificate_bundle_text(serialize_certificate(cert)).size() == 1);
}
