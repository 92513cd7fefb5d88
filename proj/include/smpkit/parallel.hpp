#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace smpkit {

/// Worker count: SMPKIT_WORKERS if set and positive, else hardware concurrency.
int worker_count();
/// Override for the current process (0 restores the default).
void set_worker_count(int n);

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// handled exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace smpkit
