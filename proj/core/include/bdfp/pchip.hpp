#pragma once

#include <cstddef>
#include <vector>

namespace bdfp {

// Monotone cubic interpolant (Fritsch-Carlson limited slopes) on a strictly
// increasing abscissa. Evaluation outside [x.front(), x.back()] clamps to the
// end values; callers that must not extrapolate check the range themselves.
class PchipInterpolant {
 public:
  PchipInterpolant() = default;
  PchipInterpolant(std::vector<double> x, std::vector<double> y);

  double operator()(double xq) const;

  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;  // d_ = limited node slopes
};

}  // namespace bdfp
