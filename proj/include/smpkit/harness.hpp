#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smpkit/config.hpp"

namespace smpkit::harness {

using json = nlohmann::json;

inline constexpr int kReportVersion = 1;

/// Library version string.
const char* version();

struct RunOptions {
  /// Worker count for this run (0: keep the process setting).
  int workers = 0;
  /// Write report.json and the CSV side files into the config's output directory.
  bool write_files = true;
};

struct RunReport {
  /// Everything except the "timing" block is a function of (config, seed).
  json report;
  /// CSV side files as (file name, contents).
  std::vector<std::pair<std::string, std::string>> files;
  bool undecided = false;
  /// 0 on completion, 2 when some verdict is Undecided.
  int exit_code = 0;
};

/// Executes the experiment. Numerical and precondition failures propagate as exceptions.
RunReport run(const config::ExperimentConfig& cfg, const RunOptions& opts = {});

/// Writes report.json and the side files into `dir` (created if missing).
void write(const RunReport& r, const std::string& dir);

/// Copy of a report without its timing block.
json strip_timing(const json& report);

/// Flat CSV extracted from a report. Throws ConfigError for an unknown `what`
/// (the message lists the options) or when the report carries no such data.
std::string emit_plotdata(const json& report, const std::string& what);
const std::vector<std::string>& plotdata_kinds();

/// Catalog entries with their notes.
json catalog_json();

}  // namespace smpkit::harness
