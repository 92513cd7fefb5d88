#pragma once

#include <string>
#include <vector>

#include "smpkit/maxprinciple.hpp"
#include "smpkit/model.hpp"

namespace smpkit::catalog {

struct Entry {
  std::string name;
  std::string description;
  /// Where the expected behaviour comes from (closed form, oracle).
  std::string note;
};

/// Registered closed-form candidate functions.
const std::vector<Entry>& list();
bool exists(const std::string& name);

struct Args {
  double scale = 1.0;
  int axis = 0;          // harmonic-coordinate
  Point pole;            // green-section (default: centre of D shifted by 0.3 along axis 0)
  Point bump_center;     // resolvent-bump (default: centre of D)
  double bump_radius = 0.3;
};

/// Instantiates a catalog entry for the operator and potential at hand.
/// Throws ConfigError for unknown names or unsupported combinations.
mp::Candidate make(const std::string& name, const Args& args, const model::OperatorSpec& op,
                   const model::MeasureSpec& nu);

}  // namespace smpkit::catalog
