#include "dihedral/kernels.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double nested_tol(double outer) { return std::max(1e-3 * outer, 1e-13); }

double sphere_area(int dim) {
  // |S^{dim}|
  const double n = dim + 1.0;
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Iterated integration of (sum_i w_i (1 + |u - z_i / tau|^2)^{-nu/2})^q over
/// R^m or B_{R/tau}: F in the scaled variable u = y / tau, which stays finite
/// as tau -> 0. F = tau^{m - nu q} G.
struct FIntegrator {
  const DiscreteMeasure& mu;
  double tau;
  double nu;
  double q;
  std::optional<double> R;
  QuadratureSpec spec;
  std::vector<double> u;
  std::vector<std::vector<double>> centers;

  FIntegrator(const DiscreteMeasure& mu_, double tau_, double nu_, double q_, std::optional<double> R_,
              const QuadratureSpec& spec_)
      : mu(mu_), tau(tau_), nu(nu_), q(q_), R(R_), spec(spec_), u(mu_.m, 0.0) {
    for (const auto& a : mu.atoms) {
      std::vector<double> c(a.z.size());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.z[i] / tau;
      centers.push_back(std::move(c));
    }
  }

  double density() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double w = mu.atoms[i].w;
      if (w <= 0.0) continue;
      sum += w * std::exp(-0.5 * nu * std::log1p(dist2(u, centers[i])));
    }
    return sum > 0.0 ? std::exp(q * std::log(sum)) : 0.0;
  }

  double level(int c) {
    const int m = mu.m;
    double lo = -kInf, hi = kInf;
    if (R) {
      double used = 0.0;
      for (int i = 0; i < c; ++i) used += u[i] * u[i];
      const double rad = *R / tau;
      const double rem = rad * rad - used;
      if (rem <= 0.0) return 0.0;
      hi = std::sqrt(rem);
      lo = -hi;
    }
    std::vector<double> cuts;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (mu.atoms[i].w <= 0.0) continue;
      const auto& z = centers[i];
      double eff2 = 1.0;
      for (int d = 0; d < c; ++d) eff2 += (u[d] - z[d]) * (u[d] - z[d]);
      double step = std::sqrt(eff2);
      cuts.push_back(z[c]);
      for (int j = 0; j < 4; ++j, step *= 4.0) {
        cuts.push_back(z[c] - step);
        cuts.push_back(z[c] + step);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> kept;
    for (double x : cuts) {
      if (!(x > lo && x < hi)) continue;
      if (kept.empty() || x - kept.back() > 1e-3) kept.push_back(x);
    }
    const auto inner = [this, c, m](double t) {
      u[c] = t;
      return c + 1 == m ? density() : level(c + 1);
    };
    QuadratureSpec s = spec;
    for (int i = 0; i < c; ++i) s.rel_tol = nested_tol(s.rel_tol);
    const double saved = u[c];
    const double v = integrate(inner, lo, hi, s, kept).value;
    u[c] = saved;
    return v;
  }
};

/// F(tau) tau^a without forming F itself.
double F_times_power(double tau, double a, const DiscreteMeasure& mu, double nu, double q,
                     std::optional<double> R, const QuadratureSpec& spec) {
  const double g = F_scaled(tau, mu, nu, q, R, spec);
  if (g == 0.0) return 0.0;
  return g * std::exp((mu.m - nu * q + a) * std::log(tau));
}

}  // namespace

double F_scaled(double tau, const DiscreteMeasure& mu, double nu, double q, std::optional<double> R,
                const QuadratureSpec& spec) {
  if (mu.empty()) return 0.0;
  FIntegrator fi(mu, tau, nu, q, R, spec);
  return fi.level(0);
}

double k_nu_m(double tau, std::span<const double> zeta, const DiscreteMeasure& mu, double nu) {
  if (!(tau > 0.0)) domain_error("tau must be > 0", "tau");
  if (static_cast<int>(zeta.size()) != mu.m) domain_error("zeta must live in R^m", "zeta");
  double sum = 0.0;
  const double t2 = tau * tau;
  for (const auto& a : mu.atoms) sum += a.w * std::pow(t2 + dist2(zeta, a.z), -0.5 * nu);
  return std::pow(tau, nu - mu.m) * sum;
}

double martin_kernel(std::span<const double> x, std::span<const double> z, const ExponentReport& rep,
                     const OpeningMode& mode) {
  const int N = rep.N, k = rep.k;
  if (static_cast<int>(x.size()) != N) domain_error("x must live in R^N", "x");
  if (static_cast<int>(z.size()) != N - k) domain_error("z must live in R^{N-k}", "z");
  const auto xp = x.first(k);
  const auto xpp = x.subspan(k);
  double r2 = 0.0;
  for (double c : xp) r2 += c * c;
  const double d2 = dist2(xpp, z);
  if (r2 + d2 == 0.0) throw ValidationError(ErrorKind::Singularity, "x coincides with the pole z", "x");
  if (r2 == 0.0) return 0.0;
  const double om = mode.omega_prime_at(xp);
  if (om <= 0.0) return 0.0;
  return std::pow(r2, 0.5 * rep.kappa_plus) * om * std::pow(r2 + d2, -0.5 * rep.nu());
}

double poisson_potential(const DiscreteMeasure& mu, std::span<const double> x, const ExponentReport& rep,
                         const OpeningMode& mode) {
  double v = 0.0;
  for (const auto& a : mu.atoms)
    if (a.w > 0.0) v += a.w * martin_kernel(x, a.z, rep, mode);
  return v;
}

double F_atom_exact(double tau, int m, double nu, double q) {
  const double a = nu * q;
  if (!(a > m)) domain_error("F of an atom needs nu q > m", "nu");
  return std::pow(tau, m - a) * std::pow(kPi, 0.5 * m) * std::exp(std::lgamma(0.5 * (a - m)) - std::lgamma(0.5 * a));
}

double F_nu_m(double tau, const DiscreteMeasure& mu, double nu, double q, std::optional<double> R,
              const QuadratureSpec& spec) {
  if (!(tau > 0.0)) domain_error("tau must be > 0", "tau");
  if (!(q > 1.0)) domain_error("q must be > 1", "q");
  if (mu.m < 1) domain_error("F needs m >= 1", "m");
  if (!R && !(nu * q > mu.m)) domain_error("F over R^m needs nu q > m", "nu");
  if (R && !(*R > 0.0)) domain_error("R must be > 0", "R");
  return F_times_power(tau, 0.0, mu, nu, q, R, spec);
}

double M_nu_s(const DiscreteMeasure& mu, double nu, double s, double q, double R, const QuadratureSpec& spec) {
  if (!(R > 0.0)) domain_error("R must be > 0", "R");
  if (!(s > 0.0)) domain_error("s must be > 0", "s");
  const double a = (s + nu - mu.m) * q - 1.0;
  QuadratureSpec inner = spec;
  inner.rel_tol = nested_tol(spec.rel_tol);
  const auto f = [&](double t) { return F_times_power(t, a, mu, nu, q, R, inner); };
  return integrate_from_zero(f, spec.epsilon, R, spec).value;
}

double exponent_identity_residual(const ExponentReport& rep, double q) {
  const double s = rep.s(q);
  const double lhs = (s + rep.nu() - rep.m()) * q - 1.0;
  const double rhs = rep.beta(q);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

double J_AR(const DiscreteMeasure& mu, const ExponentReport& rep, double R, double q, const QuadratureSpec& spec) {
  if (mu.m != rep.m()) domain_error("measure must live on the edge R^{N-k}", "m");
  const double res = exponent_identity_residual(rep, q);
  if (res > 1e-12) throw NumericalError(ErrorKind::Validation, "exponent bookkeeping identity violated", res);
  return M_nu_s(mu, rep.nu(), rep.s(q), q, R, spec);
}

namespace {

double log_h_sigma_j(double tau, double sigma, int j, double q) {
  const double e = (sigma + 1.0) * q;
  if (j == 1) return -tau + (e - 1.0) * std::log(tau);
  return (e + j - 2.0) * std::log(tau) - e * std::log1p(tau);
}

/// F(tau) exp(log_weight) with F kept in scaled form.
double F_weighted(double tau, double log_weight, const DiscreteMeasure& mu, double nu, double q,
                  std::optional<double> R, const QuadratureSpec& spec) {
  const double g = F_scaled(tau, mu, nu, q, R, spec);
  if (g == 0.0) return 0.0;
  return g * std::exp((mu.m - nu * q) * std::log(tau) + log_weight);
}

}  // namespace

double h_sigma_j(double tau, double sigma, int j, double q) { return std::exp(log_h_sigma_j(tau, sigma, j, q)); }

double reduced_I(const DiscreteMeasure& mu, const KernelParams& p, const QuadratureSpec& spec) {
  if (p.j < 1) domain_error("j must be >= 1", "j");
  QuadratureSpec inner = spec;
  inner.rel_tol = nested_tol(spec.rel_tol);
  const auto f = [&](double t) {
    return F_weighted(t, log_h_sigma_j(t, p.sigma, p.j, p.q), mu, p.nu, p.q, std::nullopt, inner);
  };
  return integrate_zero_inf(f, spec.epsilon, 1.0, spec).value;
}

double I_m_j(const DiscreteMeasure& mu, const KernelParams& p, const QuadratureSpec& spec) {
  if (p.j < 1) domain_error("j must be >= 1", "j");
  if (p.j == 1) return reduced_I(mu, p, spec);
  const double e = (p.sigma + 1.0) * p.q;
  const double c = sphere_area(p.j - 2);
  boost::math::quadrature::tanh_sinh<double> ts;
  const auto angular = [&](double t) {
    const auto g = [&](double r) {
      const double u = 1.0 - r * r;
      if (u <= 0.0) return 0.0;
      return std::exp(-t * std::sqrt(u)) * std::pow(r, p.j - 2) * std::pow(u, 0.5 * e - 1.0);
    };
    return ts.integrate(g, 0.0, 1.0, 0.01 * spec.rel_tol);
  };
  QuadratureSpec inner = spec;
  inner.rel_tol = nested_tol(spec.rel_tol);
  const auto f = [&](double t) {
    const double ang = angular(t);
    if (ang <= 0.0) return 0.0;
    return F_weighted(t, (p.j - 2 + e) * std::log(t) + std::log(ang), mu, p.nu, p.q, std::nullopt, inner);
  };
  return c * integrate_zero_inf(f, spec.epsilon, 1.0, spec).value;
}

double remainder_delta(const DiscreteMeasure& mu, const KernelParams& p, const QuadratureSpec& spec) {
  if (!(p.R > 0.0)) domain_error("R must be > 0", "R");
  QuadratureSpec inner = spec;
  inner.rel_tol = nested_tol(spec.rel_tol);
  const auto h = [&](double t) { return h_sigma_j(t, p.sigma, p.j, p.q); };
  // int_R^inf F h
  const auto far = [&](double t) {
    return F_weighted(t, log_h_sigma_j(t, p.sigma, p.j, p.q), mu, p.nu, p.q, std::nullopt, inner);
  };
  std::vector<double> cuts;
  for (double c = 2.0 * p.R; c < 1e3 * p.R; c *= 2.0) cuts.push_back(c);
  const double tail = integrate(far, p.R, kInf, spec, cuts).value;
  // int_0^R (F - F^R) h, integrating over |y| > R directly when m = 1
  const auto exterior = [&](double t) {
    if (mu.m != 1) {
      const double full = F_nu_m(t, mu, p.nu, p.q, std::nullopt, inner);
      const double ball = F_nu_m(t, mu, p.nu, p.q, p.R, inner);
      return std::max(full - ball, 0.0) * h(t);
    }
    const auto dens = [&](double y) {
      double sum = 0.0;
      for (const auto& a : mu.atoms)
        if (a.w > 0.0) sum += a.w * std::pow(t * t + (y - a.z[0]) * (y - a.z[0]), -0.5 * p.nu);
      return std::pow(sum, p.q);
    };
    const double right = integrate(dens, p.R, kInf, inner).value;
    const double left = integrate([&](double y) { return dens(-y); }, p.R, kInf, inner).value;
    return (right + left) * h(t);
  };
  const double inside = integrate_from_zero(exterior, 0.0, p.R, spec).value;
  return tail + inside;
}

double default_radius(const DiscreteMeasure& mu) { return 8.0 * (mu.support_diameter() + 1.0); }

}  // namespace dihedral
