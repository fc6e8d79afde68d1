#pragma once

#include <span>

namespace blowup {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Coefficient of determination, clamped to [0, 1].
  double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept (centered sums).
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace blowup
