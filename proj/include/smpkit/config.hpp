#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smpkit/catalog.hpp"
#include "smpkit/model.hpp"

namespace smpkit::config {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Kind { Classify, FineLimit, WeakTest, Dichotomy, Fk, Resolvent, Capacity, RevuzCheck, ExitKernelCheck };
const char* to_string(Kind k);
std::optional<Kind> kind_from(const std::string& s);
const std::vector<std::string>& kind_names();

struct Budgets {
  std::size_t replicates = 10'000;
  std::vector<double> dt{1e-3};
  double eps = 0.0;
  double quad_tol = 1e-6;
  double t = 0.1;  // horizon of fk runs
  double ci_level = 0.99;
};

struct CapacityConfig {
  std::vector<int> grid_n{21};
  int dim = 3;
  double half = 1.025;  // the grid is n^d cells covering [-half, half]^d
  std::string target = "ball";  // "ball" or "cell"
  Point center;
  double radius = 0.5;
  std::vector<double> p{1.0};
  double alpha = 1.0;
  bool dual = true;
};

struct ExitKernelConfig {
  std::vector<int> dims{2, 3};
  std::vector<double> alphas{0.25, 0.5, 0.75};
  int mc_dim = 2;
  double mc_alpha = 0.5;
  std::size_t samples = 100'000;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  Kind kind = Kind::Classify;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  model::OperatorSpec op;
  model::MeasureSpec nu;
  std::string candidate;
  catalog::Args args;
  std::vector<Point> points;
  int grid_per_axis = 5;
  double grid_margin = 0.1;
  model::RadiiSchedule radii;
  int bumps_per_axis = 3;
  double bump_radius = 0.3;
  double zero_threshold = 1e-6;
  /// Acceptance of a fine-limit extrapolation: residual <= abs + rel·|limit|.
  double fine_abs_tol = 1e-8;
  double fine_rel_tol = 1e-6;
  Budgets budgets;
  CapacityConfig capacity;
  ExitKernelConfig exit_kernel;
  /// The document as given (after overrides), echoed into reports.
  json raw;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<model::Violation> violations;
};

/// Validates the whole document and reports every violation before building anything.
ParseResult parse(const json& doc);
/// Reads and parses a file; I/O and syntax errors come back as violations.
ParseResult load(const std::string& path);

/// The document without run-location fields (output_dir); this is what reports echo and hash.
json experiment_content(const json& doc);

/// FNV-1a over the canonical (sorted-key, compact) serialization of the
/// experiment content, as 16 hex digits.
std::string config_hash(const json& doc);

/// Parsers shared with the Python bindings.
DomainSpec domain_from(const json& j);
model::OperatorSpec operator_from(const json& j);
model::MeasureSpec measure_from(const json& j);

}  // namespace smpkit::config
