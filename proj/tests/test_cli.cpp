#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(DIAGSTAB_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.output.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string fixture(const std::string& name) {
  return std::string(DIAGSTAB_FIXTURE_DIR) + "/" + name;
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/diagstab_cli_") + name;
}

}  // namespace

TEST_CASE("paper-example thresholds and exit codes") {
  const CliResult a2 = run_cli("paper-example --a 2");
  CHECK(a2.exit_code == 0);
  CHECK(a2.output.find("0.862372437") != std::string::npos);
  CHECK(a2.output.find("1.112372436") != std::string::npos);
  CHECK(a2.output.find("(1+sqrt(6))/4") != std::string::npos);
  CHECK(a2.output.find("(2+sqrt(6))/4") != std::string::npos);
  CHECK(a2.output.find("common functional exists") != std::string::npos);

  const CliResult a225 = run_cli("paper-example --a 2.25");
  CHECK(a225.exit_code == 0);
  CHECK(a225.output.find("(13+sqrt(217))/32") != std::string::npos);
  CHECK(a225.output.find("switched functional exists") != std::string::npos);

  // Far beyond every threshold nothing holds: analyzed-but-fails.
  const CliResult a6 = run_cli("paper-example --a 6");
  CHECK(a6.exit_code == 1);
  CHECK(a6.output.find("undecided") != std::string::npos);
}

TEST_CASE("analyze emits a report document") {
  const CliResult res = run_cli("--canonical analyze " + fixture("paper_a2.json"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"strongest_conclusion\": \"diagonally stable via common functional\"") !=
        std::string::npos);
  CHECK(res.output.find("generated_at") == std::string::npos);

  // Identical invocations give identical canonical output.
  const CliResult again = run_cli("--canonical analyze " + fixture("paper_a2.json"));
  CHECK(res.output == again.output);
}

TEST_CASE("input errors exit with code 2") {
  const CliResult missing = run_cli("analyze /tmp/definitely_not_here.json");
  CHECK(missing.exit_code == 2);
  const CliResult negative = run_cli("analyze " + fixture("negative_entry.json"));
  CHECK(negative.exit_code == 2);
  CHECK(negative.output.find("A[0][0][1]") != std::string::npos);
}

TEST_CASE("certify then verify round trip, tampering detected") {
  const std::string bundle = temp_path("bundle.json");
  const CliResult cert = run_cli("--canonical certify " + fixture("paper_a2.json") +
                                 " --report " + bundle);
  CHECK(cert.exit_code == 0);

  const CliResult ok = run_cli("verify " + bundle + " " + fixture("paper_a2.json"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("accepted") != std::string::npos);

  // Negate one Q entry.
  std::ifstream in(bundle);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  const std::size_t q = text.find("\"Q\": [\n");
  REQUIRE(q != std::string::npos);
  const std::size_t first_digit = text.find_first_of("0123456789", q);
  text.insert(first_digit, "-");
  const std::string tampered = temp_path("tampered.json");
  std::ofstream(tampered) << text;

  const CliResult bad = run_cli("verify " + tampered + " " + fixture("paper_a2.json"));
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("REJECTED") != std::string::npos);
  CHECK(bad.output.find("not negative") != std::string::npos);
}

TEST_CASE("simulate emits deterministic CSV") {
  const std::string args = "simulate " + fixture("paper_a2.json") +
                           " --steps 20 --seed 7 --f tanh --switching random --input zero";
  const CliResult first = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(first.output.rfind("k,sigma,x1,x2,V", 0) == 0);
  const CliResult second = run_cli(args);
  CHECK(first.output == second.output);

  const CliResult multi = run_cli("simulate " + fixture("multidelay_l2.json") +
                                  " --steps 10 --switching periodic:1,2 --f scaled:0.5");
  CHECK(multi.exit_code == 0);
  CHECK(multi.output.find("-2,,1,1,") != std::string::npos);  // two prehistory rows

  const CliResult badf = run_cli("simulate " + fixture("paper_a2.json") + " --f cubic");
  CHECK(badf.exit_code == 2);
}

TEST_CASE("network model accepts inputs during simulation") {
  const CliResult res = run_cli("simulate " + fixture("network_a2.json") +
                                " --steps 30 --seed 4 --input constant:0.1 --f identity");
  CHECK(res.exit_code == 0);
  // The driven run settles near a nonzero bound instead of decaying.
  std::istringstream lines(res.output);
  std::string line, last;
  while (std::getline(lines, line))
    if (!line.empty()) last = line;
  const std::size_t comma = last.find(',', last.find(',') + 1);
  const double x1 = std::stod(last.substr(comma + 1));
  CHECK(x1 > 0.05);

  // Inputs are rejected for models without an input channel.
  const CliResult bad = run_cli("simulate " + fixture("paper_a2.json") +
                                " --steps 5 --input constant:0.1");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("spectral reports both selection maxima") {
  const CliResult res = run_cli("spectral " + fixture("paper_a2.json"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("rho1 = 1.112372435") != std::string::npos);
  CHECK(res.output.find("rho2 = 0.862372435") != std::string::npos);
  CHECK(res.output.find("16 selections") != std::string::npos);
  CHECK(res.output.find("4 selections") != std::string::npos);

  // An unstable instance exits 1.
  const std::string unstable = temp_path("unstable.json");
  std::ofstream(unstable) << R"({
    "schema_version": 1, "model": "persidskii", "n": 1, "N": 1, "l": 1,
    "A": [[[1.5]]], "B": [[[0.2]]]
  })";
  CHECK(run_cli("spectral " + unstable).exit_code == 1);
}
