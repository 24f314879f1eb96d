#include "dihedral/capacity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "dihedral/error.hpp"
#include "dihedral/quadrature.hpp"

namespace dihedral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

double bessel_constant(double alpha) { return 1.0 / (std::pow(4.0 * kPi, 0.5 * alpha) * std::tgamma(0.5 * alpha)); }

}  // namespace

const char* to_string(CapacityVerdict v) {
  switch (v) {
    case CapacityVerdict::Positive: return "positive";
    case CapacityVerdict::Vanishing: return "vanishing";
    case CapacityVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

const char* to_string(NullTest t) {
  switch (t) {
    case NullTest::Null: return "null";
    case NullTest::Positive: return "positive";
    case NullTest::NeedsNumeric: return "needs-numeric";
  }
  return "needs-numeric";
}

CapacityVerdict judge(const std::vector<RefinementStep>& history, const VerdictRule& rule) {
  if (history.empty()) return CapacityVerdict::Inconclusive;
  const double last = history.back().value;
  if (last == 0.0) return CapacityVerdict::Vanishing;
  if (history.size() >= 3 && last < rule.vanish_threshold) {
    bool decreasing = true;
    for (std::size_t i = 1; i < history.size(); ++i)
      if (!(history[i - 1].value >= rule.vanish_ratio * history[i].value)) decreasing = false;
    if (decreasing) return CapacityVerdict::Vanishing;
  }
  if (history.size() >= 2) {
    const double prev = history[history.size() - 2].value;
    if (std::abs(last - prev) <= rule.stable_change * last && last >= rule.vanish_threshold)
      return CapacityVerdict::Positive;
  }
  return CapacityVerdict::Inconclusive;
}

double bessel_kernel(std::span<const double> x, double alpha) {
  if (!(alpha > 0.0)) domain_error("alpha must be > 0", "alpha");
  const int l = static_cast<int>(x.size());
  if (l < 1) domain_error("x must have at least one coordinate", "x");
  const double r = norm(x);
  if (r == 0.0 && alpha <= l) throw ValidationError(ErrorKind::Singularity, "G_alpha is infinite at 0 for alpha <= l", "x");
  const double nu = 0.5 * (alpha - l);
  const double a = kPi * r * r;
  const double b = 1.0 / (4.0 * kPi);
  // integrand in u = log(delta), centred at its maximum
  const double peak = std::log(2.0 * kPi * (nu + std::sqrt(nu * nu + r * r)) + 1e-300);
  const auto phi = [&](double u) { return nu * u - a * std::exp(-u) - b * std::exp(u); };
  const double phi0 = phi(peak);
  const auto f = [&](double u) { return std::exp(phi(u) - phi0); };
  std::vector<double> cuts;
  for (double d : {1.0, 3.0, 8.0, 20.0}) {
    cuts.push_back(peak - d);
    cuts.push_back(peak + d);
  }
  QuadratureSpec spec{1e-13};
  const double v = integrate(f, -kInf, kInf, spec, cuts).value;
  return bessel_constant(alpha) * v * std::exp(phi0);
}

double bessel_kernel_radial(double r, double alpha, int l) {
  if (!(alpha > 0.0)) domain_error("alpha must be > 0", "alpha");
  const double nu = 0.5 * (alpha - l);
  const double c = bessel_constant(alpha);
  if (r == 0.0) {
    if (alpha <= l) throw ValidationError(ErrorKind::Singularity, "G_alpha is infinite at 0 for alpha <= l", "r");
    return std::tgamma(nu) * std::pow(4.0 * kPi, -0.5 * l) / std::tgamma(0.5 * alpha);
  }
  if (r > 700.0) return 0.0;
  return 2.0 * c * std::pow(2.0 * kPi * r, nu) * boost::math::cyl_bessel_k(std::abs(nu), r);
}

CapacityGrid build_capacity_grid(const PointSet& points, int dim, double h_min, double margin, double base) {
  if (dim != 1 && dim != 2) throw ValidationError(ErrorKind::Configuration, "capacity grids support l = 1, 2", "dim");
  if (points.empty()) throw ValidationError(ErrorKind::Configuration, "empty point set gives no source grid", "K");
  if (!(h_min > 0.0)) domain_error("h_min must be > 0", "h_min");
  std::vector<double> lo(dim, kInf), hi(dim, -kInf);
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dim) domain_error("point dimension mismatch", "K");
    for (int d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  CapacityGrid grid;
  grid.dim = dim;
  grid.h_min = h_min;
  std::vector<double> origin(dim);
  std::vector<int> count(dim);
  for (int d = 0; d < dim; ++d) {
    origin[d] = lo[d] - margin;
    count[d] = static_cast<int>(std::ceil((hi[d] - lo[d] + 2 * margin) / base));
  }
  // cell distance to the nearest point (max norm)
  const auto distance = [&](const std::vector<double>& c, double s) {
    double best = kInf;
    for (const auto& p : points) {
      double dd = 0.0;
      for (int d = 0; d < dim; ++d) dd = std::max(dd, std::abs(p[d] - c[d]) - 0.5 * s);
      best = std::min(best, std::max(dd, 0.0));
    }
    return best;
  };
  std::vector<std::pair<std::vector<double>, double>> stack;
  if (dim == 1) {
    for (int i = count[0] - 1; i >= 0; --i) stack.push_back({{origin[0] + (i + 0.5) * base}, base});
  } else {
    for (int j = count[1] - 1; j >= 0; --j)
      for (int i = count[0] - 1; i >= 0; --i)
        stack.push_back({{origin[0] + (i + 0.5) * base, origin[1] + (j + 0.5) * base}, base});
  }
  while (!stack.empty()) {
    auto [c, s] = stack.back();
    stack.pop_back();
    if (s > h_min * (1 + 1e-9) && distance(c, s) < s) {
      const double q = 0.25 * s;
      if (dim == 1) {
        stack.push_back({{c[0] + q}, 0.5 * s});
        stack.push_back({{c[0] - q}, 0.5 * s});
      } else {
        for (int sy : {1, -1})
          for (int sx : {1, -1}) stack.push_back({{c[0] + sx * q, c[1] + sy * q}, 0.5 * s});
      }
      continue;
    }
    grid.centers.push_back(c);
    grid.sizes.push_back(s);
  }
  return grid;
}

namespace {

using GL3 = boost::math::quadrature::gauss<double, 3>;

/// int_a^b G(r) dr, 0 <= a < b
double radial_segment(double a, double b, double alpha) {
  const auto G = [&](double r) { return r > 0.0 ? bessel_kernel_radial(r, alpha, 1) : 0.0; };
  QuadratureSpec spec{1e-10};
  if (a == 0.0) return integrate_from_zero(G, 0.0, b, spec).value;
  if (a < 1e-3 * (b - a))
    return integrate_from_zero(G, 0.0, b, spec).value - integrate_from_zero(G, 0.0, a, spec).value;
  return integrate(G, a, b, spec).value;
}

double cell_integral(std::span<const double> x, const std::vector<double>& c, double s, double alpha, int dim) {
  double dist = 0.0;
  for (int d = 0; d < dim; ++d) dist = std::max(dist, std::abs(x[d] - c[d]));
  if (dist > 3.0 * s) {
    const auto& nodes = GL3::abscissa();
    const auto& weights = GL3::weights();
    // symmetric rule: nodes {0, +-t}
    std::vector<std::pair<double, double>> rule;
    rule.push_back({nodes[0], weights[0]});
    rule.push_back({nodes[1], weights[1]});
    rule.push_back({-nodes[1], weights[1]});
    double sum = 0.0;
    if (dim == 1) {
      for (auto [t, w] : rule) sum += w * bessel_kernel_radial(std::abs(c[0] + 0.5 * s * t - x[0]), alpha, 1);
      return 0.5 * s * sum;
    }
    for (auto [t1, w1] : rule)
      for (auto [t2, w2] : rule)
        sum += w1 * w2 * bessel_kernel_radial(std::hypot(c[0] + 0.5 * s * t1 - x[0], c[1] + 0.5 * s * t2 - x[1]), alpha, 2);
    return 0.25 * s * s * sum;
  }
  if (dim == 1) {
    const double t0 = c[0] - 0.5 * s - x[0];
    const double t1 = c[0] + 0.5 * s - x[0];
    if (t0 >= 0.0) return radial_segment(t0, t1, alpha);
    if (t1 <= 0.0) return radial_segment(-t1, -t0, alpha);
    return radial_segment(0.0, -t0, alpha) + radial_segment(0.0, t1, alpha);
  }
  const double y1lo = c[0] - 0.5 * s, y1hi = c[0] + 0.5 * s;
  const double y2lo = c[1] - 0.5 * s, y2hi = c[1] + 0.5 * s;
  const std::vector<double> cut1{x[0]}, cut2{x[1]};
  const auto outer = [&](double y1) {
    const auto inner = [&](double y2) {
      const double r = std::hypot(y1 - x[0], y2 - x[1]);
      return r > 0.0 ? bessel_kernel_radial(r, alpha, 2) : 0.0;
    };
    return integrate(inner, y2lo, y2hi, QuadratureSpec{1e-11}, cut2).value;
  };
  return integrate(outer, y1lo, y1hi, QuadratureSpec{1e-8}, cut1).value;
}

}  // namespace

SolveResult bessel_capacity_on_grid(const PointSet& K, double alpha, double p, const CapacityGrid& grid,
                                    double gap_tol) {
  SolveResult res;
  if (K.empty()) return res;
  if (!(alpha > 0.0)) domain_error("alpha must be > 0", "alpha");
  if (!(p > 1.0)) domain_error("p must be > 1", "p");
  if (grid.size() == 0) throw ValidationError(ErrorKind::Configuration, "empty source grid", "grid");
  const int nk = static_cast<int>(K.size());
  const int n = static_cast<int>(grid.size());
  Eigen::MatrixXd A(nk, n);
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) v(j) = std::pow(grid.sizes[j], grid.dim);
  for (int i = 0; i < nk; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cell_integral(K[i], grid.centers[j], grid.sizes[j], alpha, grid.dim);

  const double pc = p / (p - 1.0);
  const double e = 1.0 / (p - 1.0);
  Eigen::VectorXd pv = (p * v.array()).pow(-e);  // (p v_j)^{-1/(p-1)}
  const auto primal_g = [&](const Eigen::VectorXd& lam) {
    const Eigen::VectorXd a = A.transpose() * lam;
    return Eigen::VectorXd((a.array().max(0.0).pow(e) * pv.array()).matrix());
  };
  const auto dual = [&](const Eigen::VectorXd& lam) {
    const Eigen::VectorXd a = A.transpose() * lam;
    return lam.sum() - (1.0 / pc) * (a.array().max(0.0).pow(pc) * pv.array()).sum();
  };
  // start from the per-point singleton optimum
  Eigen::VectorXd lam(nk);
  for (int i = 0; i < nk; ++i) {
    const double S = (A.row(i).array().pow(pc) * pv.array().transpose()).sum();
    lam(i) = std::pow(1.0 / S, 1.0 / (pc - 1.0)) / nk;
  }
  double step = 0.0;
  {
    const Eigen::VectorXd g = primal_g(lam);
    const Eigen::VectorXd Ag = A * g;
    step = lam.sum() / std::max(Ag.sum(), 1e-300);
  }
  double D = dual(lam);
  Eigen::VectorXd prev_lam = lam, prev_grad;
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd g = primal_g(lam);
    const Eigen::VectorXd Ag = A * g;
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(nk) - Ag;
    const double theta = Ag.minCoeff();
    double P = kInf;
    if (theta > 0.0) P = (v.array() * (g.array() / theta).pow(p)).sum();
    res.gap = (P - D) / std::abs(P);
    res.iterations = it;
    if (res.gap <= gap_tol) {
      res.value = P;
      const Eigen::VectorXd gf = g / theta;
      res.g.assign(gf.data(), gf.data() + n);
      return res;
    }
    if (it > 0) {
      const Eigen::VectorXd sdiff = lam - prev_lam;
      const Eigen::VectorXd ydiff = grad - prev_grad;
      const double sy = sdiff.dot(ydiff);
      if (sy < 0.0) step = std::min(-sdiff.squaredNorm() / sy, 1e6 * step + 1e-300);
    }
    prev_lam = lam;
    prev_grad = grad;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::VectorXd trial = (lam + step * grad).cwiseMax(0.0);
      if (trial.sum() == 0.0) {
        step *= 0.5;
        continue;
      }
      const double Dt = dual(trial);
      if (Dt >= D + 1e-4 * grad.dot(trial - lam)) {
        lam = trial;
        D = Dt;
        break;
      }
      step *= 0.5;
    }
  }
  throw NumericalError(ErrorKind::Solver, "capacity solver did not reach the requested gap", res.gap);
}

CapacityResult bessel_capacity(const PointSet& K, int dim, double alpha, double p, int resolution) {
  CapacityResult out;
  if (K.empty()) {
    out.verdict = CapacityVerdict::Vanishing;
    return out;
  }
  if (resolution < 3) throw ValidationError(ErrorKind::Configuration, "resolution must be >= 3", "resolution");
  for (int level = resolution - 2; level <= resolution; ++level) {
    const double h_min = std::pow(1e-4, level);
    const CapacityGrid grid = build_capacity_grid(K, dim, h_min);
    const SolveResult s = bessel_capacity_on_grid(K, alpha, p, grid);
    out.history.push_back({h_min, s.value, s.gap});
  }
  out.value = out.history.back().value;
  out.resolution = out.history.back().resolution;
  out.verdict = judge(out.history);
  return out;
}

namespace {

void project_simplex(Eigen::VectorXd& w) {
  const int n = static_cast<int>(w.size());
  std::vector<double> u(w.data(), w.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    const double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  w = (w.array() - theta).max(0.0);
}

}  // namespace

SolveResult rho_capacity_at(const PointSet& K, const ExponentReport& rep, double q, double R, double cutoff) {
  SolveResult res;
  if (K.empty()) return res;
  const int m = rep.m();
  if (m != 1) throw ValidationError(ErrorKind::Configuration, "rho-capacity is implemented for edges with N - k = 1", "k");
  if (!(cutoff > 0.0 && cutoff < R)) domain_error("cutoff must lie in (0, R)", "cutoff");
  for (const auto& z : K)
    if (z.size() != 1) domain_error("points must live on the edge R^1", "K");
  const double nu = rep.nu();
  const double s = rep.s(q);
  const double a = (s + nu - m) * q - 1.0;
  const auto& xg = boost::math::quadrature::gauss<double, 8>::abscissa();
  const auto& wg = boost::math::quadrature::gauss<double, 8>::weights();
  std::vector<std::pair<double, double>> rule;
  for (std::size_t i = 0; i < xg.size(); ++i) {
    rule.push_back({xg[i], wg[i]});
    if (xg[i] != 0.0) rule.push_back({-xg[i], wg[i]});
  }
  const int nk = static_cast<int>(K.size());
  std::vector<double> weights;
  std::vector<double> kvals;  // row-major node x point
  for (double t0 = cutoff; t0 < R; t0 *= 2.0) {
    const double t1 = std::min(2.0 * t0, R);
    for (auto [xt, wt] : rule) {
      const double tau = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * xt;
      const double wtau = 0.5 * (t1 - t0) * wt * std::exp((a - nu * q) * std::log(tau));
      std::vector<double> cuts{-R, R};
      for (const auto& z : K)
        for (double step = tau; step < 2 * R; step *= 4.0) {
          cuts.push_back(z[0] - step);
          cuts.push_back(z[0] + step);
          cuts.push_back(z[0]);
        }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c < -R || c > R; }), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end(), [&](double x, double y) { return y - x < 1e-3 * tau; }),
                 cuts.end());
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double y0 = cuts[c], y1 = cuts[c + 1];
        for (auto [xy, wy] : rule) {
          const double y = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * xy;
          weights.push_back(wtau * 0.5 * (y1 - y0) * wy);
          for (const auto& z : K) {
            const double d = (y - z[0]) / tau;
            kvals.push_back(std::exp(-0.5 * nu * std::log1p(d * d)));
          }
        }
      }
    }
  }
  const std::size_t nodes = weights.size();
  const auto eval = [&](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    double J = 0.0;
    if (grad) grad->setZero(nk);
    for (std::size_t n = 0; n < nodes; ++n) {
      double S = 0.0;
      for (int i = 0; i < nk; ++i) S += w(i) * kvals[n * nk + i];
      if (S <= 0.0) continue;
      const double Sq1 = std::pow(S, q - 1.0);
      J += weights[n] * Sq1 * S;
      if (grad)
        for (int i = 0; i < nk; ++i) (*grad)(i) += q * weights[n] * Sq1 * kvals[n * nk + i];
    }
    return J;
  };
  Eigen::VectorXd w = Eigen::VectorXd::Constant(nk, 1.0 / nk);
  Eigen::VectorXd grad;
  double J = eval(w, &grad);
  double step = 1.0 / std::max(grad.cwiseAbs().maxCoeff(), 1e-300);
  for (int it = 0; it < 5000; ++it) {
    int best = 0;
    grad.minCoeff(&best);
    // Frank-Wolfe gap
    const double fw = grad.dot(w) - grad(best);
    res.gap = fw / J;
    res.iterations = it;
    if (res.gap <= 1e-6) break;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::VectorXd trial = w - step * grad;
      project_simplex(trial);
      Eigen::VectorXd g2;
      const double Jt = eval(trial, &g2);
      if (Jt <= J - 1e-4 * grad.dot(w - trial)) {
        w = trial;
        J = Jt;
        grad = g2;
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (res.gap > 1e-3) throw NumericalError(ErrorKind::Solver, "rho-capacity ascent stalled", res.gap);
  res.value = 1.0 / J;
  res.g.assign(w.data(), w.data() + nk);
  return res;
}

CapacityResult rho_capacity(const PointSet& K, const ExponentReport& rep, double q, double R,
                            const std::vector<double>& cutoffs) {
  CapacityResult out;
  if (K.empty()) {
    out.verdict = CapacityVerdict::Vanishing;
    return out;
  }
  for (double eps : cutoffs) {
    const SolveResult s = rho_capacity_at(K, rep, q, R, eps);
    out.history.push_back({eps, s.value, s.gap});
  }
  out.value = out.history.back().value;
  out.resolution = out.history.back().resolution;
  out.verdict = judge(out.history);
  return out;
}

NullTest capacity_null_test(const SetPiece& piece, double alpha, double p, int l) {
  const double ap = alpha * p;
  switch (piece.kind) {
    case PieceKind::Point: return ap <= l ? NullTest::Null : NullTest::Positive;
    case PieceKind::Ball:
      if (piece.intrinsic_dim >= l) return NullTest::Positive;
      return ap <= l - piece.intrinsic_dim ? NullTest::Null : NullTest::Positive;
    case PieceKind::Grid:
      if (piece.points.empty()) return NullTest::Null;
      return ap > l ? NullTest::Positive : NullTest::NeedsNumeric;
  }
  return NullTest::NeedsNumeric;
}

}  // namespace dihedral
