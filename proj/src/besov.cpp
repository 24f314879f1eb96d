#include "dihedral/besov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dihedral/error.hpp"
#include "dihedral/kernels.hpp"

namespace dihedral {

namespace {

double proxy_shell(const DiscreteMeasure& mu, double s, double q, double lo, double hi,
                   const QuadratureSpec& spec) {
  const int n = mu.m + 1;
  const double e = (s + 1.0) * q;
  QuadratureSpec inner = spec;
  inner.rel_tol = std::max(1e-3 * spec.rel_tol, 1e-13);
  const auto f = [&](double t) {
    const double g = F_scaled(t, mu, n, q, std::nullopt, inner);
    if (g == 0.0) return 0.0;
    return g * std::exp((mu.m - n * q + e - 1.0) * std::log(t) - t);
  };
  if (std::isinf(hi)) return integrate_zero_inf(f, lo, 1.0, spec).value;
  return integrate_from_zero(f, lo, hi, spec).value;
}

}  // namespace

double gamma_n(int n) { return std::tgamma(0.5 * n) / std::pow(kPi, 0.5 * n); }

double besov_proxy_value(const DiscreteMeasure& mu, double s, double q, double eps, const QuadratureSpec& spec) {
  if (!(s > 0.0)) domain_error("s must be > 0", "s");
  if (!(q > 1.0)) domain_error("q must be > 1", "q");
  if (!(eps > 0.0 && eps < 1.0)) domain_error("eps must lie in (0, 1)", "eps");
  if (mu.m < 1) domain_error("measure must live in R^{n-1} with n >= 2", "m");
  const double c = std::pow(gamma_n(mu.m + 1), q);
  return c * proxy_shell(mu, s, q, eps, std::numeric_limits<double>::infinity(), spec);
}

NormProxyResult besov_neg_proxy(const DiscreteMeasure& mu, double s, double q, double eps,
                                const QuadratureSpec& spec) {
  NormProxyResult r;
  r.epsilon = eps;
  r.value = besov_proxy_value(mu, s, q, eps, spec);
  if (r.value == 0.0) return r;
  const double c = std::pow(gamma_n(mu.m + 1), q);
  double acc = r.value;
  double hi = eps;
  r.eps_grid.push_back(eps);
  r.values.push_back(acc);
  for (int i = 0; i < 3; ++i) {
    const double lo = 0.5 * hi;
    acc += c * proxy_shell(mu, s, q, lo, hi, spec);
    r.eps_grid.push_back(lo);
    r.values.push_back(acc);
    hi = lo;
  }
  r.fit = fit_loglog(r.eps_grid, r.values);
  r.divergent = r.fit.slope < -0.1 && r.fit.r2 > 0.99;
  return r;
}

double SampledFunction::at(int i, int j) const {
  if (i < 0 || i >= shape[0]) return 0.0;
  if (dim == 1) return values[i];
  if (j < 0 || j >= shape[1]) return 0.0;
  return values[static_cast<std::size_t>(j) * shape[0] + i];
}

namespace {

void check_sampled(const SampledFunction& f) {
  if (f.dim != 1 && f.dim != 2) domain_error("sampled functions must live in R^1 or R^2", "dim");
  if (static_cast<int>(f.shape.size()) != f.dim) domain_error("shape must have one entry per dimension", "shape");
  std::size_t count = 1;
  for (int n : f.shape) count *= static_cast<std::size_t>(n);
  if (count != f.values.size()) domain_error("value count does not match the shape", "values");
  if (!(f.h > 0.0)) domain_error("grid step must be > 0", "h");
}

double support_diameter(const SampledFunction& f) {
  int lo[2] = {std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
  int hi[2] = {-1, -1};
  const int ny = f.dim == 2 ? f.shape[1] : 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < f.shape[0]; ++i)
      if (f.at(i, j) != 0.0) {
        lo[0] = std::min(lo[0], i);
        hi[0] = std::max(hi[0], i);
        lo[1] = std::min(lo[1], j);
        hi[1] = std::max(hi[1], j);
      }
  if (hi[0] < 0) return 0.0;
  const double dx = (hi[0] - lo[0] + 1) * f.h;
  const double dy = f.dim == 2 ? (hi[1] - lo[1] + 1) * f.h : 0.0;
  return std::hypot(dx, dy);
}

double sphere_measure(int l) { return l == 1 ? 2.0 : 2.0 * kPi; }

/// Rectangle sums of |g|^p over index ranges [i0, i1) x [j0, j1).
class PowerPrefix {
 public:
  PowerPrefix(const SampledFunction& g, double p) : nx_(g.shape[0]), ny_(g.dim == 2 ? g.shape[1] : 1) {
    sums_.assign(static_cast<std::size_t>(nx_ + 1) * (ny_ + 1), 0.0);
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i)
        at(i + 1, j + 1) = std::pow(std::abs(g.at(i, j)), p) + at(i, j + 1) + at(i + 1, j) - at(i, j);
  }
  double rect(int i0, int i1, int j0, int j1) const {
    if (i0 >= i1 || j0 >= j1) return 0.0;
    return get(i1, j1) - get(i0, j1) - get(i1, j0) + get(i0, j0);
  }
  double total() const { return get(nx_, ny_); }

 private:
  double& at(int i, int j) { return sums_[static_cast<std::size_t>(j) * (nx_ + 1) + i]; }
  double get(int i, int j) const { return sums_[static_cast<std::size_t>(j) * (nx_ + 1) + i]; }
  int nx_, ny_;
  std::vector<double> sums_;
};

/// Lattice Gagliardo sum of a grid field g with exponent sp, plus the exact
/// tail beyond T and a first-order correction for the cell around y = 0.
double gagliardo(const SampledFunction& g, double sp, double p, double T) {
  const int l = g.dim;
  const double h = g.h;
  const int K = static_cast<int>(std::ceil(T / h));
  const int nx = g.shape[0];
  const int ny = l == 2 ? g.shape[1] : 1;
  const double cell = std::pow(h, l);
  const PowerPrefix prefix(g, p);
  const double S = prefix.total();
  double sum = 0.0;
  double grad = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double gx = (g.at(i + 1, j) - g.at(i - 1, j)) / (2 * h);
      const double gy = l == 2 ? (g.at(i, j + 1) - g.at(i, j - 1)) / (2 * h) : 0.0;
      grad += std::pow(std::hypot(gx, gy), p);
    }
  const double lp = S * cell;
  grad *= cell;
  const int kyr = l == 2 ? K : 0;
  for (int ky = -kyr; ky <= kyr; ++ky)
    for (int kx = -K; kx <= K; ++kx) {
      if (kx == 0 && ky == 0) continue;
      const double r = h * std::hypot(kx, ky);
      if (r > T) continue;
      const double w = std::pow(r, -(l + sp)) * cell;
      // pairs with both ends on the grid, then the one-sided remainder
      const int i0 = std::max(0, -kx), i1 = std::min(nx, nx - kx);
      const int j0 = std::max(0, -ky), j1 = std::min(ny, ny - ky);
      double inner = 2.0 * S - prefix.rect(i0, i1, j0, j1) - prefix.rect(i0 + kx, i1 + kx, j0 + ky, j1 + ky);
      for (int j = j0; j < j1; ++j)
        for (int i = i0; i < i1; ++i) {
          const double d = g.at(i + kx, j + ky) - g.at(i, j);
          if (d != 0.0) inner += std::pow(std::abs(d), p);
        }
      sum += std::max(inner, 0.0) * cell * w;
    }
  const double tail = 2.0 * lp * sphere_measure(l) * std::pow(T, -sp) / sp;
  // |y| < rho with rho^l equal to the removed cell volume
  const double rho = l == 1 ? 0.5 * h : h / std::sqrt(kPi);
  // integral of |cos|^p over the unit sphere S^{l-1}
  const double angular = l == 1 ? 2.0 : 2.0 * std::sqrt(kPi) * std::tgamma(0.5 * (p + 1)) / std::tgamma(0.5 * p + 1);
  const double near = grad * angular * std::pow(rho, p - sp) / (p - sp);
  return sum + tail + near;
}

double second_difference_sum(const SampledFunction& g, double p, double T) {
  const int l = g.dim;
  const double h = g.h;
  const int K = static_cast<int>(std::ceil(T / h));
  const int nx = g.shape[0];
  const int ny = l == 2 ? g.shape[1] : 1;
  const double cell = std::pow(h, l);
  double lp = 0.0;
  for (double v : g.values) lp += std::pow(std::abs(v), p);
  lp *= cell;
  double sum = 0.0;
  const int kyr = l == 2 ? K : 0;
  for (int ky = -kyr; ky <= kyr; ++ky)
    for (int kx = -K; kx <= K; ++kx) {
      if (kx == 0 && ky == 0) continue;
      const double r = h * std::hypot(kx, ky);
      if (r > T) continue;
      const double w = std::pow(r, -(l + p)) * cell;
      if (std::abs(kx) >= nx || std::abs(ky) >= ny) {
        sum += (2.0 + std::pow(2.0, p)) * lp * w;
        continue;
      }
      double inner = 0.0;
      for (int j = -std::abs(ky); j < ny + std::abs(ky); ++j)
        for (int i = -std::abs(kx); i < nx + std::abs(kx); ++i) {
          const double d = g.at(i + kx, j + ky) + g.at(i - kx, j - ky) - 2.0 * g.at(i, j);
          if (d != 0.0) inner += std::pow(std::abs(d), p);
        }
      sum += inner * cell * w;
    }
  const double tail = (2.0 + std::pow(2.0, p)) * lp * sphere_measure(l) * std::pow(T, -p) / p;
  return sum + tail;
}

SampledFunction gradient_component(const SampledFunction& f, int axis) {
  SampledFunction g = f;
  const int nx = f.shape[0];
  const int ny = f.dim == 2 ? f.shape[1] : 1;
  // pad by one cell so differences at the boundary are kept
  g.shape[0] = nx + 2;
  if (f.dim == 2) g.shape[1] = ny + 2;
  const int gny = f.dim == 2 ? ny + 2 : 1;
  g.values.assign(static_cast<std::size_t>(g.shape[0]) * gny, 0.0);
  for (int j = 0; j < gny; ++j)
    for (int i = 0; i < nx + 2; ++i) {
      const int si = i - 1, sj = f.dim == 2 ? j - 1 : 0;
      const double d = axis == 0 ? f.at(si + 1, sj) - f.at(si - 1, sj) : f.at(si, sj + 1) - f.at(si, sj - 1);
      g.values[static_cast<std::size_t>(j) * g.shape[0] + i] = d / (2 * f.h);
    }
  return g;
}

double lp_sum(const SampledFunction& f, double p) {
  double s = 0.0;
  for (double v : f.values) s += std::pow(std::abs(v), p);
  return s * std::pow(f.h, f.dim);
}

}  // namespace

double besov_pos_norm_raw(const SampledFunction& f, double s, double p) {
  check_sampled(f);
  if (!(s > 0.0 && s < 2.0)) domain_error("s must lie in (0, 2)", "s");
  if (!(p >= 1.0)) domain_error("p must be >= 1", "p");
  const double diam = support_diameter(f);
  if (diam == 0.0) return 0.0;
  const double T = 4.0 * diam;
  double total = lp_sum(f, p);
  if (s < 1.0) {
    total += gagliardo(f, s * p, p, T);
  } else if (s == 1.0) {
    total += second_difference_sum(f, p, T);
  } else {
    for (int axis = 0; axis < f.dim; ++axis) {
      const SampledFunction g = gradient_component(f, axis);
      total += lp_sum(g, p);
      total += gagliardo(g, (s - 1.0) * p, p, T + 2 * f.h);
    }
  }
  return std::pow(total, 1.0 / p);
}

SampledFunction coarsen(const SampledFunction& f) {
  SampledFunction c;
  c.dim = f.dim;
  c.h = 2.0 * f.h;
  c.origin = f.origin;
  const int nx = (f.shape[0] + 1) / 2;
  const int ny = f.dim == 2 ? (f.shape[1] + 1) / 2 : 1;
  c.shape = f.dim == 2 ? std::vector<int>{nx, ny} : std::vector<int>{nx};
  c.values.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) c.values[static_cast<std::size_t>(j) * nx + i] = f.at(2 * i, 2 * j);
  return c;
}

PosNormResult besov_pos_norm_checked(const SampledFunction& f, double s, double p) {
  PosNormResult r;
  r.value = besov_pos_norm_raw(f, s, p);
  if (r.value == 0.0) return r;
  r.coarse_value = besov_pos_norm_raw(coarsen(f), s, p);
  r.delta = std::abs(r.value - r.coarse_value) / r.value;
  if (r.delta >= 0.05)
    throw NumericalError(ErrorKind::Resolution, "grid too coarse: refinement delta >= 5%", r.delta);
  return r;
}

double besov_pos_norm(const SampledFunction& f, double s, double p) { return besov_pos_norm_checked(f, s, p).value; }

}  // namespace dihedral
