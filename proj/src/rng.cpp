#include "smpkit/rng.hpp"

#include <cmath>
#include <numbers>

namespace smpkit {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t task_id(const std::string& label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t task, std::uint64_t replicate)
    : seed_(seed), task_(task), replicate_(replicate) {
  std::uint64_t a = mix64(seed);
  std::uint64_t b = mix64(a ^ task);
  std::uint64_t c = mix64(b ^ replicate);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double rad = std::sqrt(-2.0 * std::log(u1));
  double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

double RngStream::exponential() { return -std::log(uniform()); }

Point RngStream::normal_point(int d) {
  Point p(d);
  for (int i = 0; i < d; ++i) p[i] = normal();
  return p;
}

Point RngStream::direction(int d) {
  for (;;) {
    Point p = normal_point(d);
    double n = norm(p);
    if (n > 1e-300) return p * (1.0 / n);
  }
}

std::string RngStream::id() const {
  return std::to_string(seed_) + ":" + std::to_string(task_) + ":" + std::to_string(replicate_);
}

}  // namespace smpkit
