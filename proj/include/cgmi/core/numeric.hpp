#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace cgmi {

/// Neumaier-compensated accumulator. Results are independent of summation
/// order to within a few ulps of the total.
class KahanSum {
 public:
  KahanSum& operator+=(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  KahanSum s;
  for (double x : xs) s += x;
  return s.value();
}

/// x * log2(x) with the 0 log 0 = 0 convention.
inline double xlog2x(double x) noexcept { return x > 0.0 ? x * std::log2(x) : 0.0; }

inline bool all_finite(std::span<const double> xs) noexcept {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace cgmi
