#pragma once

#include <span>

namespace dihedral {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
  /// 95% confidence interval of the slope.
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n = 0;
};

/// Ordinary least squares y = a + b x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares on (log x, log y).
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace dihedral
