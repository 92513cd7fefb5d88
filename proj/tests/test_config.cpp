#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "smpkit/config.hpp"

using namespace smpkit;
using namespace smpkit::config;

namespace {
json base() {
  return json::parse(R"({
    "schema_version": 1, "kind": "classify", "seed": 3,
    "operator": {"kind": "laplacian", "domain": {"type": "ball", "center": [0, 0, 0], "radius": 1}},
    "measure": [{"type": "power", "a": 2, "pole": [0, 0, 0], "weight": 6}],
    "points": [[0, 0, 0]]
  })");
}

bool has_field(const ParseResult& r, const std::string& field) {
  return std::any_of(r.violations.begin(), r.violations.end(), [&](const auto& v) { return v.field == field; });
}
}  // namespace

TEST_CASE("every shipped example config parses") {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(SMPKIT_EXAMPLES_DIR)) {
    if (e.path().extension() != ".json") continue;
    auto r = load(e.path().string());
    INFO(e.path().string());
    CHECK(r.violations.empty());
    CHECK(r.config.has_value());
    ++n;
  }
  CHECK(n == 9);
}

TEST_CASE("a minimal classify config parses with default radii") {
  auto r = parse(base());
  REQUIRE(r.config);
  CHECK(r.config->kind == Kind::Classify);
  CHECK(r.config->seed == 3);
  CHECK(r.config->radii.r_max == 0.5);
  CHECK(r.config->radii.count == 4);
  CHECK(r.config->op.dim == 3);
}

TEST_CASE("missing seed is a violation") {
  auto doc = base();
  doc.erase("seed");
  auto r = parse(doc);
  CHECK_FALSE(r.config);
  CHECK(has_field(r, "seed"));
}

TEST_CASE("all violations are reported together") {
  auto doc = base();
  doc["kind"] = "fine-limit";
  doc["seed"] = -1;
  doc["candidate"] = "no-such-function";
  doc["radii"] = {{"r_max", 0.1}, {"r_min", 0.01}, {"count", 1}};
  doc["points"] = {{2.0, 0.0, 0.0}};
  auto r = parse(doc);
  CHECK_FALSE(r.config);
  CHECK(has_field(r, "seed"));
  CHECK(has_field(r, "candidate"));
  CHECK(has_field(r, "radii.count"));
  CHECK(has_field(r, "points[0]"));
}

TEST_CASE("unknown kinds list the valid ones") {
  auto doc = base();
  doc["kind"] = "bogus";
  auto r = parse(doc);
  REQUIRE(has_field(r, "kind"));
  auto it = std::find_if(r.violations.begin(), r.violations.end(), [](const auto& v) { return v.field == "kind"; });
  for (const auto& k : kind_names()) CHECK(it->rule.find(k) != std::string::npos);
}

TEST_CASE("operator and measure semantics are checked") {
  auto doc = base();
  doc["operator"] = {{"kind", "fractional"}, {"alpha", 1.7}, {"domain", doc["operator"]["domain"]}};
  doc["measure"] = {{{"type", "power"}, {"a", -1}, {"pole", {0, 0, 0}}}};
  auto r = parse(doc);
  CHECK_FALSE(r.config);
  CHECK(has_field(r, "measure[0].a"));
  CHECK(std::any_of(r.violations.begin(), r.violations.end(),
                    [](const auto& v) { return v.field.rfind("operator", 0) == 0; }));
}

TEST_CASE("unreadable files come back as violations") {
  auto r = load("/nonexistent/config.json");
  CHECK_FALSE(r.config);
  CHECK_FALSE(r.violations.empty());
}

TEST_CASE("config hash ignores key order and tracks content") {
  auto a = base();
  auto b = json::parse(R"({"seed": 3, "points": [[0, 0, 0]], "kind": "classify", "schema_version": 1,
    "measure": [{"weight": 6, "type": "power", "pole": [0, 0, 0], "a": 2}],
    "operator": {"domain": {"radius": 1, "type": "ball", "center": [0, 0, 0]}, "kind": "laplacian"}})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b["seed"] = 4;
  CHECK(config_hash(a) != config_hash(b));
}
