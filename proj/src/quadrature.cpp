#include "dihedral/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// Always integrate over the unit interval: the library compares an unscaled
// local error with a scaled tolerance, which never terminates on tiny ranges.
QuadResult finite_piece(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  QuadResult r;
  const double w = b - a;
  const auto g = [&](double x) { return f(a + w * x) * w; };
  r.value = GK::integrate(g, 0.0, 1.0, spec.max_depth, spec.rel_tol, &r.error, &r.l1);
  return r;
}

// Semi-infinite ranges use y = a + L u / (1 - u) with L tied to |a| so the
// decay scale of the integrand is resolved.
QuadResult piece(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  QuadResult r;
  if (!(b > a)) return r;
  if (std::isfinite(a) && std::isfinite(b)) return finite_piece(f, a, b, spec);
  if (std::isfinite(a)) {
    const double L = std::max(1.0, std::abs(a));
    const auto g = [&](double u) {
      const double om = 1.0 - u;
      if (om <= 0.0) return 0.0;
      return f(a + L * u / om) * L / (om * om);
    };
    return finite_piece(g, 0.0, 1.0, spec);
  }
  if (std::isfinite(b)) {
    const double L = std::max(1.0, std::abs(b));
    const auto g = [&](double u) {
      const double om = 1.0 - u;
      if (om <= 0.0) return 0.0;
      return f(b - L * u / om) * L / (om * om);
    };
    return finite_piece(g, 0.0, 1.0, spec);
  }
  QuadResult left = piece(f, a, 0.0, spec);
  left += piece(f, 0.0, b, spec);
  return left;
}

void check(const QuadResult& r, const QuadratureSpec& spec) {
  if (!std::isfinite(r.value))
    throw NumericalError(ErrorKind::Accuracy, "quadrature produced a non-finite value", r.error);
  const double target = std::max(50.0 * spec.rel_tol * r.l1, spec.abs_tol);
  if (r.error > target && r.error > 1e-300) {
    std::ostringstream os;
    os << "quadrature did not converge: error estimate " << r.error << " above target " << target;
    throw NumericalError(ErrorKind::Accuracy, os.str(), r.error);
  }
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec,
                     std::span<const double> breakpoints) {
  if (std::isnan(a) || std::isnan(b)) domain_error("integration limits are NaN");
  std::vector<double> cuts{a};
  std::vector<double> inner(breakpoints.begin(), breakpoints.end());
  std::sort(inner.begin(), inner.end());
  for (double c : inner)
    if (c > cuts.back() && c < b) cuts.push_back(c);
  cuts.push_back(b);
  QuadResult total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += piece(f, cuts[i], cuts[i + 1], spec);
  check(total, spec);
  return total;
}

QuadResult integrate_from_zero(const Integrand& f, double lo, double hi, const QuadratureSpec& spec) {
  QuadResult total;
  if (!(hi > lo)) return total;
  double right = hi;
  for (int j = 0; j < 40; ++j) {
    const double left = 0.5 * right;
    if (left <= lo) {
      total += piece(f, lo, right, spec);
      check(total, spec);
      return total;
    }
    total += piece(f, left, right, spec);
    right = left;
  }
  // remainder (lo, right) in u = log(tau)
  const auto g = [&f](double u) {
    const double t = std::exp(u);
    return t == 0.0 ? 0.0 : f(t) * t;
  };
  const double ulo = lo > 0.0 ? std::log(lo) : -std::numeric_limits<double>::infinity();
  QuadResult tail;
  if (std::isfinite(ulo)) {
    tail = finite_piece(g, ulo, std::log(right), spec);
  } else {
    tail = piece(g, -std::numeric_limits<double>::infinity(), std::log(right), spec);
  }
  total += tail;
  check(total, spec);
  return total;
}

QuadResult integrate_zero_inf(const Integrand& f, double lo, double scale, const QuadratureSpec& spec) {
  QuadResult total = integrate_from_zero(f, lo, std::max(scale, lo), spec);
  double left = std::max(scale, lo);
  for (int j = 0; j < 6; ++j) {
    total += piece(f, left, 2.0 * left, spec);
    left *= 2.0;
  }
  total += piece(f, left, std::numeric_limits<double>::infinity(), spec);
  check(total, spec);
  return total;
}

}  // namespace dihedral
