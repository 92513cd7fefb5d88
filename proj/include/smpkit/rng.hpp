#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "smpkit/geometry.hpp"

namespace smpkit {

/// Random stream addressed by (master seed, task, replicate). The engine is
/// seeded from a hash of the triple, so a stream never depends on which worker
/// runs it or in which order. Variates are produced by hand-written transforms
/// to stay bit-identical across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t task, std::uint64_t replicate);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  double exponential();
  /// i.i.d. standard normal coordinates.
  Point normal_point(int d);
  /// Uniform direction on S^{d-1}.
  Point direction(int d);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t task() const { return task_; }
  std::uint64_t replicate() const { return replicate_; }
  std::string id() const;

 private:
  std::uint64_t seed_;
  std::uint64_t task_;
  std::uint64_t replicate_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer, used to derive stream keys and task ids.
std::uint64_t mix64(std::uint64_t x);
/// Stable 64-bit id of a label (FNV-1a), for naming tasks.
std::uint64_t task_id(const std::string& label);

}  // namespace smpkit
