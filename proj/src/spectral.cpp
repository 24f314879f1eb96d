#include "dihedral/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

constexpr double kPoleOffset = 1e-6;

bool at_pole(double t) { return t == 0.0 || t == kPi; }

bool singular_at(const SLProblem& p, double t) { return at_pole(t) && (p.d > 0 || p.mu > 0.0); }

/// Frobenius exponent of the bounded solution at a pole: r (r + d - 1) = mu.
double frobenius_r(const SLProblem& p) {
  const double dm1 = p.d - 1.0;
  return 0.5 * (-dm1 + std::sqrt(dm1 * dm1 + 4.0 * p.mu));
}

struct State {
  double f;
  double g;  // f'
};

struct Shooter {
  const SLProblem& p;
  double gamma;
  double h;
  double ratio;

  State rhs(double t, const State& y) const {
    const double s = std::sin(t);
    const double c = std::cos(t);
    const double drift = p.d == 0 ? 0.0 : -p.d * (c / s) * y.g;
    const double pot = p.mu == 0.0 ? 0.0 : p.mu / (s * s);
    return {y.g, drift + (pot - gamma) * y.f};
  }

  double step_at(double t) const {
    const double dist = std::min(t, kPi - t);
    return std::min(h, std::max(ratio * dist, 1e-9));
  }

  void rk4(double t, double dt, State& y) const {
    const State k1 = rhs(t, y);
    const State y2{y.f + 0.5 * dt * k1.f, y.g + 0.5 * dt * k1.g};
    const State k2 = rhs(t + 0.5 * dt, y2);
    const State y3{y.f + 0.5 * dt * k2.f, y.g + 0.5 * dt * k2.g};
    const State k3 = rhs(t + 0.5 * dt, y3);
    const State y4{y.f + dt * k3.f, y.g + dt * k3.g};
    const State k4 = rhs(t + dt, y4);
    y.f += dt / 6.0 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f);
    y.g += dt / 6.0 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g);
  }

  /// Advances y from t0 to t1, counting sign changes of f.
  void advance(double t0, double t1, State& y, int& sign, int& changes) const {
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    while (dir * (t1 - t) > 0.0) {
      double dt = std::min(step_at(t), dir * (t1 - t));
      if (dir * (t1 - t) - dt < 1e-15) dt = dir * (t1 - t);
      rk4(t, dir * dt, y);
      t += dir * dt;
      const int s = (y.f > 0) - (y.f < 0);
      if (s != 0 && s != sign) {
        if (sign != 0) ++changes;
        sign = s;
      }
      if (!std::isfinite(y.f) || std::abs(y.f) > 1e150) {
        changes += 1000;
        return;
      }
    }
  }

  /// Start state at an endpoint, oriented so f > 0 inside.
  State start(double endpoint, bool from_left, double& t0) const {
    if (singular_at(p, endpoint)) {
      const double r = frobenius_r(p);
      const double c = (p.d * r / 3.0 + p.mu / 3.0 - gamma) / (2.0 * (2.0 * r + p.d + 1.0));
      const double e = kPoleOffset;
      const double f = std::pow(e, r) * (1.0 + c * e * e);
      const double df = r * std::pow(e, r - 1.0) + c * (r + 2.0) * std::pow(e, r + 1.0);
      t0 = from_left ? endpoint + e : endpoint - e;
      return {f, from_left ? df : -df};
    }
    t0 = endpoint;
    return {0.0, from_left ? 1.0 : -1.0};
  }
};

struct ShotOutcome {
  State left;
  State right;
  int changes = 0;
};

ShotOutcome shoot_both(const SLProblem& p, double gamma, int n) {
  Shooter sh{p, gamma, (p.b - p.a) / n, std::min(0.1, 16.0 / n)};
  const double mid = 0.5 * (p.a + p.b);
  ShotOutcome out;
  double t0 = 0.0;
  out.left = sh.start(p.a, true, t0);
  int sign = 1;
  sh.advance(t0, mid, out.left, sign, out.changes);
  out.right = sh.start(p.b, false, t0);
  sign = 1;
  sh.advance(t0, mid, out.right, sign, out.changes);
  return out;
}

/// True when gamma lies strictly below the first eigenvalue.
bool below_first(const SLProblem& p, double gamma, int n) {
  const ShotOutcome s = shoot_both(p, gamma, n);
  if (s.changes > 0) return false;
  if (s.left.f <= 0.0 || s.right.f <= 0.0) return false;
  const double w = s.left.f * s.right.g - s.left.g * s.right.f;
  return w < 0.0;
}

double bisect_first(const SLProblem& p, int n, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (below_first(p, mid, n))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> bracket(const SLProblem& p, int n) {
  const double guess = sl_eigen_fd(p, 256);
  double lo = 0.7 * guess;
  double hi = 1.3 * guess + 1e-3;
  int guard = 0;
  while (!below_first(p, lo, n)) {
    lo *= 0.5;
    if (++guard > 60 || lo < 1e-300)
      throw NumericalError(ErrorKind::Bracket, "no sign change located below the FD estimate", guess);
  }
  guard = 0;
  while (below_first(p, hi, n)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 60)
      throw NumericalError(ErrorKind::Bracket, "no sign change located above the FD estimate", guess);
  }
  return {lo, hi};
}

void sample(const SLProblem& p, double gamma, int n, EigenResult& res) {
  const double h = (p.b - p.a) / n;
  Shooter sh{p, gamma, h, std::min(0.1, 16.0 / n)};
  const int half = n / 2;
  res.theta.resize(n + 1);
  res.f.assign(n + 1, 0.0);
  res.df.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) res.theta[i] = p.a + i * h;
  res.theta[half] = 0.5 * (p.a + p.b);

  int sign = 1;
  int changes = 0;
  double t0 = 0.0;
  State y = sh.start(p.a, true, t0);
  if (singular_at(p, p.a)) {
    const double r = frobenius_r(p);
    res.f[0] = r > 0.0 ? 0.0 : y.f;
    res.df[0] = r == 0.0 ? 0.0 : (r == 1.0 ? y.g : (r > 1.0 ? 0.0 : y.g));
  } else {
    res.f[0] = y.f;
    res.df[0] = y.g;
  }
  double t = t0;
  for (int i = 1; i <= half; ++i) {
    sh.advance(t, res.theta[i], y, sign, changes);
    t = res.theta[i];
    res.f[i] = y.f;
    res.df[i] = y.g;
  }
  const double left_mid = y.f;
  const double left_mid_d = y.g;

  std::vector<double> rf(n + 1, 0.0), rdf(n + 1, 0.0);
  y = sh.start(p.b, false, t0);
  if (singular_at(p, p.b)) {
    const double r = frobenius_r(p);
    rf[n] = r > 0.0 ? 0.0 : y.f;
    rdf[n] = r == 0.0 ? 0.0 : (r > 1.0 ? 0.0 : y.g);
  } else {
    rf[n] = y.f;
    rdf[n] = y.g;
  }
  sign = 1;
  t = t0;
  for (int i = n - 1; i >= half; --i) {
    sh.advance(t, res.theta[i], y, sign, changes);
    t = res.theta[i];
    rf[i] = y.f;
    rdf[i] = y.g;
  }
  const double scale = left_mid / rf[half];
  for (int i = half + 1; i <= n; ++i) {
    res.f[i] = scale * rf[i];
    res.df[i] = scale * rdf[i];
  }
  res.df[half] = 0.5 * (left_mid_d + scale * rdf[half]);
  double fmax = 0.0;
  for (double v : res.f) fmax = std::max(fmax, v);
  for (auto& v : res.f) v /= fmax;
  for (auto& v : res.df) v /= fmax;
  res.h = h;
}

}  // namespace

SLProblem validate_problem(const SLProblem& p) {
  if (!(p.a < p.b) || p.a < 0.0 || p.b > kPi)
    throw ValidationError(ErrorKind::Validation, "interval must satisfy 0 <= a < b <= pi", "interval");
  if (p.d < 0) throw ValidationError(ErrorKind::Validation, "weight exponent d must be >= 0", "d");
  if (!(p.mu >= 0.0)) throw ValidationError(ErrorKind::Validation, "mu must be >= 0", "mu");
  auto check_end = [&](double t, EndpointKind kind, const char* field) {
    if (singular_at(p, t) && kind != EndpointKind::Bounded)
      throw ValidationError(ErrorKind::PoleEndpoint,
                            "interval touches a pole; use the bounded endpoint mode", field);
    if (!singular_at(p, t) && kind == EndpointKind::Bounded)
      throw ValidationError(ErrorKind::Validation, "bounded mode needs a singular pole endpoint", field);
  };
  check_end(p.a, p.left, "left");
  check_end(p.b, p.right, "right");
  if (p.left == EndpointKind::Bounded && p.right == EndpointKind::Bounded && p.mu == 0.0)
    throw ValidationError(ErrorKind::PoleEndpoint, "both poles bounded with mu = 0 has no Dirichlet part",
                          "interval");
  return p;
}

double sl_eigen_fd(const SLProblem& p, int n) {
  validate_problem(p);
  if (n < 4) domain_error("need at least 4 cells", "n");
  const double h = (p.b - p.a) / n;
  auto neumann = [&](double t) { return singular_at(p, t) && frobenius_r(p) == 0.0; };
  const int first = neumann(p.a) ? 0 : 1;
  const int last = neumann(p.b) ? n : n - 1;
  const int size = last - first + 1;
  auto pw = [&](double t) { return std::pow(std::sin(t), p.d); };
  Eigen::VectorXd A_diag(size), A_off(std::max(size - 1, 0)), B(size);
  for (int i = first; i <= last; ++i) {
    const int r = i - first;
    const double t = p.a + i * h;
    double diag = 0.0;
    if (i > 0) diag += pw(t - 0.5 * h) / h;
    if (i < n) diag += pw(t + 0.5 * h) / h;
    if (i == 0 || i == n) {
      const double cell = std::pow(0.5 * h, p.d + 1) / (p.d + 1.0);
      B(r) = cell;
    } else {
      const double s = std::sin(t);
      diag += h * p.mu * std::pow(s, p.d - 2);
      B(r) = h * std::pow(s, p.d);
    }
    A_diag(r) = diag;
    if (r + 1 < size) A_off(r) = -pw(t + 0.5 * h) / h;
  }
  Eigen::VectorXd diag(size), off(std::max(size - 1, 0));
  for (int r = 0; r < size; ++r) diag(r) = A_diag(r) / B(r);
  for (int r = 0; r + 1 < size; ++r) off(r) = A_off(r) / std::sqrt(B(r) * B(r + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double sl_eigen_shoot(const SLProblem& p, int n) {
  validate_problem(p);
  if (n % 2) ++n;
  const auto [lo, hi] = bracket(p, n);
  return bisect_first(p, n, lo, hi);
}

EigenResult sl_eigen_1d(const SLProblem& p, double tol) {
  validate_problem(p);
  if (!(tol > 1e-12 && tol < 1e-2)) domain_error("tol must lie in (1e-12, 1e-2)", "tol");
  int n = 2048;
  auto [lo, hi] = bracket(p, n);
  double prev = bisect_first(p, n, lo, hi);
  for (;;) {
    const int n2 = 2 * n;
    const double lo2 = std::max(0.0, prev * (1.0 - 1e-3));
    const double hi2 = prev * (1.0 + 1e-3);
    double cur;
    if (below_first(p, lo2, n2) && !below_first(p, hi2, n2)) {
      cur = bisect_first(p, n2, lo2, hi2);
    } else {
      auto [l, h] = bracket(p, n2);
      cur = bisect_first(p, n2, l, h);
    }
    const double err = std::abs(cur - prev) / 15.0;
    if (err <= tol * cur || n2 >= (1 << 17)) {
      if (err > tol * cur) {
        std::ostringstream os;
        os << "eigenvalue did not reach tolerance " << tol;
        throw NumericalError(ErrorKind::Accuracy, os.str(), err / cur);
      }
      EigenResult res;
      res.gamma = cur;
      res.a = p.a;
      res.b = p.b;
      res.error = err;
      sample(p, cur, n2, res);
      return res;
    }
    prev = cur;
    n = n2;
  }
}

double EigenResult::operator()(double t) const {
  if (t < a || t > b || theta.size() < 2) return 0.0;
  const std::size_t n = theta.size() - 1;
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>((t - a) / h), n - 1);
  while (i > 0 && theta[i] > t) --i;
  while (i + 1 < n && theta[i + 1] < t) ++i;
  const double t0 = theta[i], t1 = theta[i + 1];
  const double dt = t1 - t0;
  const double u = (t - t0) / dt;
  if (!std::isfinite(df[i]) || !std::isfinite(df[i + 1])) return f[i] + u * (f[i + 1] - f[i]);
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * f[i] + h10 * dt * df[i] + h01 * f[i + 1] + h11 * dt * df[i + 1];
}

OpeningMode opening_mode(const WedgeSpec& spec_in, double tol) {
  const WedgeSpec spec = validate_wedge(spec_in);
  OpeningMode mode;
  mode.spec = spec;
  if (spec.k == 1) return mode;
  double mu = (kPi / spec.alpha1) * (kPi / spec.alpha1);
  for (int j = 2; j <= spec.k - 1; ++j) {
    const auto [a, b] = spec.intervals[j - 2];
    SLProblem p{a, b, j - 1, mu, a == 0.0 ? EndpointKind::Bounded : EndpointKind::Dirichlet,
                b == kPi ? EndpointKind::Bounded : EndpointKind::Dirichlet};
    mode.stages.push_back(sl_eigen_1d(p, tol));
    mu = mode.stages.back().gamma;
  }
  mode.gamma = mu;
  return mode;
}

double gamma_first_eigenvalue(const WedgeSpec& spec, double tol) {
  const WedgeSpec s = validate_wedge(spec);
  if (s.k < 2) throw ValidationError(ErrorKind::Range, "gamma is defined for k >= 2", "k");
  if (s.k == 2) return (kPi / s.alpha1) * (kPi / s.alpha1);
  return opening_mode(s, tol).gamma;
}

double OpeningMode::omega_prime(std::span<const double> theta) const {
  if (theta.empty() || theta[0] < 0.0 || theta[0] > spec.alpha1) return 0.0;
  double v = std::sin(kPi * theta[0] / spec.alpha1);
  for (std::size_t j = 0; j < stages.size(); ++j) v *= stages[j](theta[j + 1]);
  return std::max(v, 0.0);
}

double OpeningMode::omega_prime_at(std::span<const double> xprime) const {
  if (spec.k == 1) return xprime[0] > 0.0 ? 1.0 : 0.0;
  const SphericalPoint sp = cartesian_to_spherical(xprime);
  return omega_prime(sp.sigma);
}

double omega_SA(const OpeningMode& mode, double kappa_plus, std::span<const double> sigma) {
  const WedgeSpec& s = mode.spec;
  if (!in_spherical_domain(s, sigma)) domain_error("sigma lies outside S_A", "sigma");
  if (s.k == 1) {
    double v = 1.0;
    for (double t : sigma) v *= std::sin(t);
    return std::max(v, 0.0);
  }
  double v = mode.omega_prime(sigma.first(s.k - 1));
  for (int l = s.k; l <= s.N - 1; ++l) v *= std::pow(std::sin(sigma[l - 1]), kappa_plus);
  return v;
}

}  // namespace dihedral
