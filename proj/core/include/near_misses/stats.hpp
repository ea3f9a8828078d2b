#pragma once

#include <cstddef>
#include <vector>

namespace near_misses {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x; needs >= 2 points.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct GrowthFit {
  LinearFit fit;
  /// Number of (x, y) pairs dropped because y <= 0.
  std::size_t filtered = 0;
};

/// Slope of log y against log x. Pairs with y <= 0 are dropped and counted.
GrowthFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace near_misses
