#pragma once

#include <functional>
#include <span>

namespace dihedral {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  unsigned max_depth = 15;
  /// Inner cutoff used by divergence probes; 0 means integrate down to 0.
  double epsilon = 0.0;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    l1 += o.l1;
    return *this;
  }
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) on [a, b]; b may be +infinity. Breakpoints
/// inside (a, b) split the range. Throws NumericalError(Accuracy) when the
/// achieved error misses the tolerance.
QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec,
                     std::span<const double> breakpoints = {});

/// Integral over (lo, hi) of a function with an integrable algebraic
/// singularity at lo = 0 (lo > 0 acts as a cutoff): dyadic panels toward 0 and
/// a log-substituted remainder.
QuadResult integrate_from_zero(const Integrand& f, double lo, double hi, const QuadratureSpec& spec);

/// Same on (lo, infinity).
QuadResult integrate_zero_inf(const Integrand& f, double lo, double scale, const QuadratureSpec& spec);

}  // namespace dihedral
