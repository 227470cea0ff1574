#pragma once

#include <cstddef>
#include <vector>

namespace biphoton {

// Kahan-compensated accumulator. Fixed left-to-right order keeps every
// reduction in the project deterministic; the compensation keeps grid-norm
// sums accurate to ~1e-15 relative even over 1e8 terms.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double kahan_total(const std::vector<double>& values) {
  KahanSum s;
  for (double v : values) s.add(v);
  return s.value();
}

// Trapezoid weight on a uniform grid of n points: 1/2 at the ends.
inline double trapezoid_weight(std::size_t i, std::size_t n) {
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

}  // namespace biphoton
