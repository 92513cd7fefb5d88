#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "smpkit/config.hpp"
#include "smpkit/errors.hpp"
#include "smpkit/harness.hpp"
#include "smpkit/parallel.hpp"

namespace {

using smpkit::config::json;

std::optional<json> read_json(const std::string& path, std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot open " << path << "\n";
    return std::nullopt;
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    err << "error: " << path << " is not valid JSON\n";
    return std::nullopt;
  }
  return doc;
}

std::optional<smpkit::config::ExperimentConfig> load(const std::string& path, std::optional<std::uint64_t> seed,
                                                      const std::string& output_dir) {
  auto doc = read_json(path, std::cerr);
  if (!doc) return std::nullopt;
  if (seed) (*doc)["seed"] = *seed;
  if (!output_dir.empty()) (*doc)["output_dir"] = output_dir;
  auto res = smpkit::config::parse(*doc);
  if (!res.violations.empty()) {
    std::cerr << "config " << path << " has " << res.violations.size() << " violation(s):\n";
    for (const auto& v : res.violations) std::cerr << "  " << (v.field.empty() ? "<root>" : v.field) << ": " << v.rule << "\n";
    return std::nullopt;
  }
  return res.config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smpkit: strong maximum principle experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", smpkit::harness::version());

  int workers = 0;
  app.add_option("--workers", workers, "Worker threads (overrides SMPKIT_WORKERS)")->check(CLI::NonNegativeNumber);

  std::string config_path, output_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run an experiment and write report.json plus CSV side files");
  run->add_option("config", config_path, "Config file (JSON)")->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--output-dir,-o", output_dir, "Override the output directory");

  auto* validate = app.add_subcommand("validate", "Check a config and list every violation");
  validate->add_option("config", config_path, "Config file (JSON)")->required();

  bool as_json = false;
  auto* catalog = app.add_subcommand("catalog", "List the registered candidate functions");
  catalog->add_flag("--json", as_json, "Print as JSON");

  std::string report_path, what, out_path;
  auto* plot = app.add_subcommand("plotdata", "Extract flat CSV from a report");
  plot->add_option("report", report_path, "report.json")->required();
  plot->add_option("--what", what, "Data set to extract")->required();
  plot->add_option("--out", out_path, "Write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);
  if (workers > 0) smpkit::set_worker_count(workers);

  try {
    if (*run) {
      auto cfg = load(config_path, seed, output_dir);
      if (!cfg) return 1;
      auto rr = smpkit::harness::run(*cfg);
      std::cout << "kind: " << rr.report["kind"].get<std::string>() << "\n";
      for (const auto& v : rr.report["verdicts"])
        std::cout << "  " << v["subject"].get<std::string>() << ": " << v["verdict"].get<std::string>() << "\n";
      std::cout << "report: " << cfg->output_dir << "/report.json\n";
      return rr.exit_code;
    }
    if (*validate) {
      auto cfg = load(config_path, std::nullopt, "");
      if (!cfg) return 1;
      std::cout << "ok: " << smpkit::config::to_string(cfg->kind) << " config, hash "
                << smpkit::config::config_hash(cfg->raw) << "\n";
      return 0;
    }
    if (*catalog) {
      auto entries = smpkit::harness::catalog_json();
      if (as_json) {
        std::cout << entries.dump(2) << "\n";
      } else {
        for (const auto& e : entries)
          std::cout << e["name"].get<std::string>() << "\n    " << e["description"].get<std::string>() << "\n    note: "
                    << e["note"].get<std::string>() << "\n";
      }
      return 0;
    }
    if (*plot) {
      auto report = read_json(report_path, std::cerr);
      if (!report) return 1;
      std::string csv = smpkit::harness::emit_plotdata(*report, what);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(out_path) << csv;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
