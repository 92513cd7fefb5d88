#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "smpkit/errors.hpp"
#include "smpkit/harness.hpp"

using namespace smpkit;
using harness::json;

namespace fs = std::filesystem;

namespace {
json example(const std::string& name) {
  std::ifstream in(std::string(SMPKIT_EXAMPLES_DIR) + "/" + name);
  return json::parse(in);
}

config::ExperimentConfig parsed(const json& doc) {
  auto r = config::parse(doc);
  REQUIRE(r.violations.empty());
  return *r.config;
}

harness::RunReport run(const json& doc, int workers = 1) {
  harness::RunOptions o;
  o.workers = workers;
  o.write_files = false;
  return harness::run(parsed(doc), o);
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("smpkit_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int shell(const std::string& cmd) {
  int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string first_lines(const std::string& csv, int n) {
  std::istringstream in(csv);
  std::string line, out;
  for (int i = 0; i < n && std::getline(in, line); ++i) out += line + "\n";
  return out;
}
}  // namespace

TEST_CASE("dichotomy run on the catalog example") {
  auto rr = run(example("dichotomy.json"));
  const json& r = rr.report;
  CHECK(rr.exit_code == 0);
  CHECK(r["report_version"] == harness::kReportVersion);
  CHECK(r["kind"] == "dichotomy");
  CHECK(r["status"] == "completed");
  REQUIRE(r["verdicts"].size() == 1);
  CHECK(r["verdicts"][0]["verdict"] == "Consistent");
  for (const char* key : {"seed", "config_hash", "config", "versions", "outputs", "files", "timing"})
    CHECK(r.contains(key));
  CHECK(r["timing"]["workers"] == 1);
}

TEST_CASE("undecided verdicts map to exit code 2") {
  auto doc = example("fine_limit.json");
  doc["candidate"] = "residence-ball";
  doc["measure"] = json::array();
  doc["fine_limit"] = {{"abs_tol", 1e-300}, {"rel_tol", 1e-300}};
  auto rr = run(doc);
  CHECK(rr.undecided);
  CHECK(rr.exit_code == 2);
  CHECK(rr.report["status"] == "undecided");
}

TEST_CASE("reports do not depend on the worker count") {
  for (const char* name : {"fk.json", "revuz_check.json", "dichotomy.json"}) {
    auto doc = example(name);
    if (doc.contains("budgets")) doc["budgets"]["replicates"] = 600;
    auto one = run(doc, 1);
    auto three = run(doc, 3);
    INFO(name);
    CHECK(one.report["timing"]["workers"] == 1);
    CHECK(three.report["timing"]["workers"] == 3);
    CHECK(harness::strip_timing(one.report).dump() == harness::strip_timing(three.report).dump());
  }
}

TEST_CASE("output location does not enter the report") {
  auto doc = example("classify.json");
  auto a = run(doc);
  doc["output_dir"] = "elsewhere";
  auto b = run(doc);
  CHECK(harness::strip_timing(a.report).dump() == harness::strip_timing(b.report).dump());
}

TEST_CASE("plot data columns") {
  auto fl = run(example("fine_limit.json")).report;
  auto csv = harness::emit_plotdata(fl, "fine-limit");
  CHECK(csv.rfind("# config_hash: " + fl["config_hash"].get<std::string>() + "\n", 0) == 0);
  CHECK(first_lines(csv, 2).find("point,r,average,extrapolated\n") != std::string::npos);

  auto cl = run(example("classify.json")).report;
  CHECK(harness::emit_plotdata(cl, "classify").find("point,delta,J,fit_a,fit_b,fit_c\n") != std::string::npos);

  auto cap_doc = example("capacity.json");
  cap_doc["capacity"]["grid_n"] = {7};
  auto cap = run(cap_doc).report;
  CHECK(harness::emit_plotdata(cap, "capacity").find("h,n,p,value,dual_value\n") != std::string::npos);

  try {
    harness::emit_plotdata(cl, "nonsense");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    for (const auto& k : harness::plotdata_kinds()) CHECK(msg.find(k) != std::string::npos);
  }
  CHECK_THROWS_AS(harness::emit_plotdata(cl, "capacity"), ConfigError);
}

TEST_CASE("catalog entries carry their oracle notes") {
  auto cat = harness::catalog_json();
  auto note = [&](const std::string& name) -> std::string {
    for (const auto& e : cat)
      if (e["name"] == name) return e["note"];
    return "";
  };
  CHECK(note("paper-example-x2").find("zero set {0}") != std::string::npos);
  CHECK(note("residence-ball").find("radial ODE") != std::string::npos);
  CHECK(note("constant-one").find("constant") != std::string::npos);
}

TEST_CASE("written reports and side files") {
  auto dir = scratch("write");
  auto rr = run(example("classify.json"));
  harness::write(rr, dir.string());
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "classify.csv"));
  std::ifstream in(dir / "report.json");
  CHECK(json::parse(in) == rr.report);
}

TEST_CASE("command line interface") {
  const std::string cli = SMPKIT_CLI_PATH;
  const std::string ex = SMPKIT_EXAMPLES_DIR;
  auto dir = scratch("cli");
  CHECK(shell(cli + " --version") == 0);
  CHECK(shell(cli + " catalog --json") == 0);
  CHECK(shell(cli + " validate " + ex + "/weak_test.json") == 0);
  CHECK(shell(cli + " run " + ex + "/weak_test.json --workers 2 -o " + (dir / "weak").string()) == 0);
  CHECK(fs::exists(dir / "weak" / "report.json"));
  CHECK(shell(cli + " plotdata " + (dir / "weak" / "report.json").string() + " --what classify") == 1);

  std::ofstream(dir / "bad.json") << R"({"schema_version": 1, "kind": "classify"})";
  CHECK(shell(cli + " validate " + (dir / "bad.json").string()) == 1);
  CHECK(shell(cli + " run " + (dir / "bad.json").string()) == 1);

  auto doc = example("fine_limit.json");
  doc["candidate"] = "residence-ball";
  doc["measure"] = json::array();
  doc["fine_limit"] = {{"abs_tol", 1e-300}, {"rel_tol", 1e-300}};
  std::ofstream(dir / "undecided.json") << doc.dump();
  CHECK(shell(cli + " run " + (dir / "undecided.json").string() + " -o " + (dir / "und").string()) == 2);
}
