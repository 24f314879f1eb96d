#include "dihedral/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include "dihedral/besov.hpp"
#include "dihedral/error.hpp"
#include "dihedral/fit.hpp"
#include "dihedral/quadrature.hpp"
#include "dihedral/spectral.hpp"

namespace dihedral {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_num(double v) { return std::isfinite(v) ? num(v) : std::string(); }

Metric make_metric(std::string name, double value, std::optional<bool> pass = std::nullopt) {
  Metric m;
  m.name = std::move(name);
  m.value = value;
  m.pass = pass;
  return m;
}

Metric fit_metric(std::string name, const LinearFit& f, std::optional<bool> pass = std::nullopt) {
  Metric m = make_metric(std::move(name), f.slope, pass);
  m.ci_low = f.ci_low;
  m.ci_high = f.ci_high;
  return m;
}

template <class F>
void parallel_for(int n, int threads, F&& body) {
  threads = std::clamp(threads, 1, std::max(n, 1));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void finish(ExperimentReport& r, Clock::time_point t0) {
  r.runtime = seconds_since(t0);
  bool ok = true;
  for (const auto& m : r.metrics)
    if (m.pass && !*m.pass) ok = false;
  r.pass = ok && r.verdict != "inconclusive";
}

}  // namespace

const Metric* ExperimentReport::find(const std::string& n) const {
  for (const auto& m : metrics)
    if (m.name == n) return &m;
  return nullptr;
}

const Metric& ExperimentReport::metric(const std::string& n) const {
  if (const Metric* m = find(n)) return *m;
  throw ValidationError(ErrorKind::Reference, "report has no metric '" + n + "'", "metric");
}

std::string ExperimentReport::parameter_string() const {
  std::string s;
  for (const auto& [k, v] : parameters) {
    if (!s.empty()) s += ';';
    s += k + '=' + v;
  }
  return s;
}

std::string to_csv(const std::vector<ExperimentReport>& reports, bool include_runtime) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : reports) {
    const std::string params = r.parameter_string();
    for (const auto& m : r.metrics) {
      os << r.name << ',' << params << ',' << m.name << ',' << csv_num(m.value) << ',' << csv_num(m.ci_low) << ','
         << csv_num(m.ci_high) << ',' << (m.pass ? (*m.pass ? "true" : "false") : "") << '\n';
    }
    if (include_runtime) os << r.name << ',' << params << ",runtime_s," << csv_num(r.runtime) << ",,,\n";
    os << r.name << ',' << params << ",overall,,,," << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Dichotomy

ExperimentReport dichotomy_experiment(const DichotomyConfig& cfg) {
  const auto t0 = Clock::now();
  if (!(cfg.q > 1.0)) domain_error("q must be > 1", "q");
  const ExponentReport rep = critical_exponents(cfg.N, cfg.k, cfg.gamma);
  std::vector<double> eps = cfg.eps_grid;
  if (eps.empty())
    for (int i = 0; i <= 6; ++i) eps.push_back(std::pow(10.0, -2.0 - i));
  if (eps.size() < 4) throw ValidationError(ErrorKind::Configuration, "eps grid needs at least 4 points", "eps_grid");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] < 1.0)) domain_error("eps must lie in (0, 1)", "eps_grid");
    if (i > 0 && !(eps[i] < eps[i - 1])) domain_error("eps grid must decrease", "eps_grid");
  }
  const int m = rep.m();
  const double a = cfg.q * rep.nu();
  const double b = (cfg.q + 1.0) * rep.kappa_plus + cfg.k - 1.0;
  const double e = b + m - a;
  if (m > 0 && !(a > m)) domain_error("inner integral diverges: q nu <= N - k", "q");

  // G(r') = int_0^{1/r'} tau^{m-1} (1 + tau^2)^{-a/2} dtau, the rescaled edge integral
  const auto G = [&](double rp) {
    if (m == 0) return 1.0;
    const auto f = [&](double t) { return std::pow(t, m - 1.0) * std::pow(1.0 + t * t, -0.5 * a); };
    const double top = 1.0 / rp;
    std::vector<double> cuts;
    for (double c = 1.0; c < top; c *= 8.0) cuts.push_back(c);
    return integrate(f, 0.0, top, QuadratureSpec{1e-12}, cuts).value;
  };
  // int_lo^hi r'^e G(r') dr' in u = log r'
  const auto shell = [&](double lo, double hi) {
    const auto f = [&](double u) { return std::exp((e + 1.0) * u) * G(std::exp(u)); };
    return integrate(f, std::log(lo), std::log(hi), QuadratureSpec{1e-11}).value;
  };

  std::vector<double> upper, shells;
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    upper.push_back(eps[i]);
    shells.push_back(shell(eps[i + 1], eps[i]));
  }
  std::vector<double> I(eps.size());
  I[0] = shell(eps[0], 1.0);
  for (std::size_t i = 1; i < eps.size(); ++i) I[i] = I[i - 1] + shells[i - 1];

  const LinearFit sf = fit_loglog(upper, shells);
  const LinearFit lf = fit_loglog(eps, I);
  const double predicted = e + 1.0;
  const bool theory_divergent = cfg.q >= rep.q_c || predicted <= 0.0;

  std::string verdict;
  constexpr double kFlat = 1e-3;
  if (sf.ci_low > 0.0 && sf.slope > kFlat) {
    verdict = "convergent";
  } else if (sf.ci_high <= 0.0 || std::abs(sf.slope) <= kFlat) {
    verdict = (sf.slope < -kFlat && sf.r2 < 0.99) ? "inconclusive" : "divergent";
  } else {
    verdict = "inconclusive";
  }

  ExperimentReport r;
  r.name = "dichotomy";
  r.parameters = {{"N", std::to_string(cfg.N)}, {"k", std::to_string(cfg.k)}, {"gamma", num(cfg.gamma)},
                  {"q", num(cfg.q)}, {"eps_max", num(eps.front())}, {"eps_min", num(eps.back())}};
  r.verdict = verdict;
  const double tol = cfg.slope_tol * std::max(std::abs(predicted), 0.02);
  r.metrics.push_back(fit_metric("shell_slope", sf, std::abs(sf.slope - predicted) <= tol));
  r.metrics.push_back(make_metric("predicted_slope", predicted));
  r.metrics.push_back(make_metric("shell_r2", sf.r2));
  r.metrics.push_back(fit_metric("log_I_slope", lf));
  r.metrics.push_back(make_metric("predicted_log_I_slope", std::min(0.0, predicted)));
  r.metrics.push_back(make_metric("q_c", rep.q_c));
  r.metrics.push_back(
      make_metric("divergent", verdict == "divergent" ? 1.0 : 0.0, (verdict == "divergent") == theory_divergent));
  r.raw["eps"] = eps;
  r.raw["I"] = I;
  r.raw["shells"] = shells;
  finish(r, t0);
  return r;
}

// ---------------------------------------------------------------------------
// Equivalence

std::vector<DiscreteMeasure> random_measure_family(int m, int count, double radius, std::uint64_t seed) {
  if (m < 1) domain_error("family needs m >= 1", "m");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> atoms(1, 10);
  std::vector<DiscreteMeasure> out;
  for (int c = 0; c < count; ++c) {
    DiscreteMeasure mu;
    mu.m = m;
    const int n = atoms(rng);
    for (int i = 0; i < n; ++i) {
      Atom a;
      a.z.resize(m);
      for (;;) {
        double r2 = 0.0;
        for (auto& x : a.z) {
          x = radius * (2.0 * unit(rng) - 1.0);
          r2 += x * x;
        }
        if (r2 < radius * radius) break;
      }
      a.w = 1.0 - unit(rng);
      mu.atoms.push_back(std::move(a));
    }
    out.push_back(std::move(mu));
  }
  return out;
}

ExperimentReport equivalence_experiment(const EquivalenceConfig& cfg) {
  const ExponentReport rep = critical_exponents(cfg.N, cfg.k, cfg.gamma);
  return equivalence_experiment(cfg, random_measure_family(rep.m(), cfg.family_size, cfg.R / 4.0, cfg.seed));
}

ExperimentReport equivalence_experiment(const EquivalenceConfig& cfg, const std::vector<DiscreteMeasure>& family) {
  const auto t0 = Clock::now();
  const ExponentReport rep = critical_exponents(cfg.N, cfg.k, cfg.gamma);
  const double q = cfg.q;
  if (!(q >= rep.q_c && q < rep.q_c_star))
    throw ValidationError(ErrorKind::Range, "equivalence needs q_c <= q < q_c*", "q");
  if (family.empty()) throw ValidationError(ErrorKind::Configuration, "empty measure family", "family");
  const int m = rep.m();
  const double s = rep.s(q);
  const double nu = rep.nu();
  QuadratureSpec spec{1e-7};
  spec.epsilon = cfg.epsilon;
  const double two_q = std::pow(2.0, q);
  const int n = static_cast<int>(family.size());
  std::vector<double> M(n), M2(n), P(n), P2(n);
  std::vector<std::vector<double>> MR(cfg.R_grid.size(), std::vector<double>(n));
  for (const auto& mu : family) {
    if (mu.m != m) domain_error("family must live on R^{N-k}", "family");
    if (mu.support_radius() > 0.5 * *std::min_element(cfg.R_grid.begin(), cfg.R_grid.end()))
      domain_error("family must be supported in B_{R/2} for the smallest R", "family");
  }
  parallel_for(n, cfg.threads, [&](int i) {
    const DiscreteMeasure twice = family[i].scaled(2.0);
    M[i] = J_AR(family[i], rep, cfg.R, q, spec);
    M2[i] = J_AR(twice, rep, cfg.R, q, spec);
    P[i] = besov_proxy_value(family[i], s, q, cfg.epsilon, spec);
    P2[i] = besov_proxy_value(twice, s, q, cfg.epsilon, spec);
    for (std::size_t j = 0; j < cfg.R_grid.size(); ++j)
      MR[j][i] = cfg.R_grid[j] == cfg.R ? M[i] : J_AR(family[i], rep, cfg.R_grid[j], q, spec);
  });
  double hom_M = 0.0, hom_P = 0.0;
  std::vector<double> ratio(n);
  for (int i = 0; i < n; ++i) {
    hom_M = std::max(hom_M, std::abs(M2[i] / (two_q * M[i]) - 1.0));
    hom_P = std::max(hom_P, std::abs(P2[i] / (two_q * P[i]) - 1.0));
    ratio[i] = M[i] / P[i];
  }
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  const double spread = *hi / *lo;
  std::vector<double> upper;
  for (std::size_t j = 0; j < cfg.R_grid.size(); ++j) {
    double u = 0.0;
    for (int i = 0; i < n; ++i) u = std::max(u, MR[j][i] / P[i]);
    upper.push_back(u);
  }
  const LinearFit growth = fit_loglog(cfg.R_grid, upper);
  const double growth_bound = (s + nu - m) * q + 1.0;

  // cutoff dependence on the first measure: both sides blow up like eps^{q(s - m/q')}
  QuadratureSpec fine = spec;
  fine.epsilon = cfg.epsilon / 4.0;
  const double Mf = J_AR(family[0], rep, cfg.R, q, fine);
  const double Pf = besov_proxy_value(family[0], s, q, fine.epsilon, spec);
  const double cut_M = std::log(Mf / M[0]) / std::log(0.25);
  const double cut_P = std::log(Pf / P[0]) / std::log(0.25);

  ExperimentReport r;
  r.name = "equivalence";
  r.parameters = {{"N", std::to_string(cfg.N)},       {"k", std::to_string(cfg.k)},
                  {"gamma", num(cfg.gamma)},          {"q", num(q)},
                  {"R", num(cfg.R)},                  {"family_size", std::to_string(n)},
                  {"seed", std::to_string(cfg.seed)}, {"epsilon", num(cfg.epsilon)}};
  r.metrics.push_back(make_metric("s", s));
  r.metrics.push_back(make_metric("homogeneity_M", hom_M, hom_M <= cfg.homogeneity_tol));
  r.metrics.push_back(make_metric("homogeneity_proxy", hom_P, hom_P <= cfg.homogeneity_tol));
  r.metrics.push_back(make_metric("ratio_spread", spread, spread <= cfg.spread_bound));
  r.metrics.push_back(make_metric("ratio_min", *lo));
  r.metrics.push_back(make_metric("ratio_max", *hi));
  r.metrics.push_back(fit_metric("R_growth_exponent", growth, growth.slope <= growth_bound * (1.0 + cfg.growth_slack)));
  r.metrics.push_back(make_metric("R_growth_bound", growth_bound));
  r.metrics.push_back(make_metric("cutoff_exponent_M", cut_M));
  r.metrics.push_back(make_metric("cutoff_exponent_proxy", cut_P));
  r.metrics.push_back(make_metric("cutoff_exponent_predicted", q * (s - m / conjugate(q))));
  r.raw["M"] = M;
  r.raw["proxy"] = P;
  r.raw["ratio"] = ratio;
  r.raw["R_grid"] = cfg.R_grid;
  r.raw["upper_ratio"] = upper;
  if (s > m / conjugate(q) && std::isfinite(P[0]))
    r.notes.push_back("anomaly: finite proxy with s > m/q'");
  r.verdict = "bounded";
  finish(r, t0);
  if (!r.pass) r.verdict = "unbounded";
  return r;
}

// ---------------------------------------------------------------------------
// Remainder

ExperimentReport remainder_experiment(const DiscreteMeasure& mu, const RemainderConfig& cfg) {
  const auto t0 = Clock::now();
  KernelParams p = cfg.params;
  if (mu.m != p.m) domain_error("measure dimension must equal m", "m");
  if (!(p.m < p.nu * p.q)) domain_error("remainder needs m < nu q", "nu");
  if (!(p.j - 1 < p.nu * p.q)) domain_error("remainder needs j - 1 < nu q", "j");
  if (cfg.R_grid.size() < 2) throw ValidationError(ErrorKind::Configuration, "R grid needs two points", "R_grid");
  if (mu.support_radius() > 0.5 * cfg.R_grid.front())
    domain_error("measure must be supported in B_{R/2} for the smallest R", "mu");
  QuadratureSpec spec{1e-9};
  std::vector<double> delta;
  for (double R : cfg.R_grid) {
    p.R = R;
    delta.push_back(remainder_delta(mu, p, spec));
  }
  p.R = cfg.R_grid.front();
  const double twice = remainder_delta(mu.scaled(2.0), p, spec);
  const double hom = std::abs(twice / (std::pow(2.0, p.q) * delta.front()) - 1.0);
  bool monotone = true;
  for (std::size_t i = 1; i < delta.size(); ++i)
    if (delta[i] > delta[i - 1] * (1 + 1e-9)) monotone = false;
  bool usable = true;
  for (double d : delta)
    if (!(d > 0.0) || !std::isfinite(d)) usable = false;

  ExperimentReport r;
  r.name = "remainder";
  r.parameters = {{"nu", num(p.nu)}, {"sigma", num(p.sigma)},      {"m", std::to_string(p.m)},
                  {"j", std::to_string(p.j)}, {"q", num(p.q)}, {"mass", num(mu.mass())}};
  const double bound = (p.sigma + 1.0 - p.nu) * p.q + p.m + p.j - 1.0;
  if (usable) {
    const LinearFit f = fit_loglog(cfg.R_grid, delta);
    r.metrics.push_back(fit_metric("fitted_exponent", f, f.slope <= bound + cfg.slack));
    r.metrics.push_back(make_metric("fit_r2", f.r2));
    r.verdict = f.slope <= bound + cfg.slack ? "within-bound" : "exceeds-bound";
  } else {
    r.verdict = "inconclusive";
  }
  r.metrics.push_back(make_metric("bound", bound));
  r.metrics.push_back(make_metric("monotone", monotone ? 1.0 : 0.0, monotone));
  r.metrics.push_back(make_metric("homogeneity", hom, hom <= 1e-6));
  r.raw["R"] = cfg.R_grid;
  r.raw["delta"] = delta;
  finish(r, t0);
  return r;
}

// ---------------------------------------------------------------------------
// Harmonicity

ExperimentReport harmonicity_experiment(const HarmonicityConfig& cfg) {
  const auto t0 = Clock::now();
  WedgeSpec spec;
  spec.N = cfg.N;
  spec.k = cfg.k;
  spec.alpha1 = cfg.alpha1;
  for (int j = 2; j < cfg.k; ++j) spec.intervals.push_back({0.25 * kPi, 0.75 * kPi});
  spec = validate_wedge(spec);
  if (cfg.k < 2) throw ValidationError(ErrorKind::Range, "harmonicity needs k >= 2", "k");
  const OpeningMode mode = opening_mode(spec);
  const ExponentReport rep = critical_exponents(cfg.N, cfg.k, mode.gamma);
  const std::vector<double> pole(cfg.N - cfg.k, 0.0);
  const auto f = [&](std::span<const double> x) {
    if (cfg.target == HarmonicTarget::MartinKernel) return martin_kernel(x, pole, rep, mode);
    const auto xp = x.first(cfg.k);
    double r2 = 0.0;
    for (double c : xp) r2 += c * c;
    return std::pow(r2, 0.5 * rep.kappa_plus) * mode.omega_prime_at(xp);
  };
  const double hmax = *std::max_element(cfg.h_grid.begin(), cfg.h_grid.end());
  // off-centre directions: at theta_1 = alpha1 / 2 the O(h^2) term can cancel
  double reach = std::sin(std::min(cfg.alpha1 / 3.0, 0.5 * kPi));
  for (int j = 1; j < cfg.k - 1; ++j)
    reach = std::min(reach, std::sin(0.5 * (spec.intervals[j - 1].second - spec.intervals[j - 1].first)));
  const double r0 = (10.0 * hmax + 0.5) / reach;
  std::vector<std::vector<double>> samples;
  for (double frac : {1.0 / 3.0, 2.0 / 3.0}) {
    std::vector<double> sigma(cfg.k - 1);
    sigma[0] = frac * cfg.alpha1;
    for (int j = 1; j < cfg.k - 1; ++j) sigma[j] = 0.5 * (spec.intervals[j - 1].first + spec.intervals[j - 1].second);
    for (double rf : {1.0, 1.5}) {
      const std::vector<double> xp = spherical_to_cartesian(r0 * rf, sigma);
      for (double tail : {0.0, 0.7}) {
        std::vector<double> x(xp);
        for (int d = cfg.k; d < cfg.N; ++d) x.push_back(tail);
        samples.push_back(std::move(x));
      }
    }
  }
  std::vector<double> res;
  for (double h : cfg.h_grid) {
    double worst = 0.0;
    for (const auto& x : samples) {
      const double fx = f(x);
      double lap = 0.0;
      std::vector<double> y(x);
      for (int d = 0; d < cfg.N; ++d) {
        y[d] = x[d] + h;
        const double fp = f(y);
        y[d] = x[d] - h;
        const double fm = f(y);
        y[d] = x[d];
        lap += (fp - 2.0 * fx + fm) / (h * h);
      }
      worst = std::max(worst, std::abs(lap));
    }
    res.push_back(worst);
  }
  ExperimentReport r;
  r.name = "harmonicity";
  r.parameters = {{"N", std::to_string(cfg.N)},
                  {"k", std::to_string(cfg.k)},
                  {"alpha1", num(cfg.alpha1)},
                  {"target", cfg.target == HarmonicTarget::VA ? "v_A" : "K_A"}};
  r.metrics.push_back(make_metric("kappa_plus", rep.kappa_plus));
  for (std::size_t i = 0; i < res.size(); ++i) r.metrics.push_back(make_metric("residual_h=" + num(cfg.h_grid[i]), res[i]));
  const double worst = *std::max_element(res.begin(), res.end());
  if (worst <= cfg.exact_tol) {
    r.verdict = "exact";
    r.metrics.push_back(make_metric("max_residual", worst, true));
  } else {
    r.verdict = "second-order";
    std::vector<double> orders;
    for (std::size_t i = 0; i + 1 < res.size(); ++i) {
      const double o = std::log(res[i] / res[i + 1]) / std::log(cfg.h_grid[i] / cfg.h_grid[i + 1]);
      orders.push_back(o);
      r.metrics.push_back(make_metric("order_" + std::to_string(i + 1), o, o >= cfg.order_low && o <= cfg.order_high));
    }
    r.raw["orders"] = orders;
  }
  r.raw["h"] = cfg.h_grid;
  r.raw["residual"] = res;
  finish(r, t0);
  return r;
}

// ---------------------------------------------------------------------------
// Heat lifting

HeatLift::HeatLift(int m, double R, double h, const std::vector<double>& eta) : m_(m), R_(R), h_(h) {
  if (m != 1 && m != 2) throw ValidationError(ErrorKind::Configuration, "heat lifting supports N - k = 1, 2", "m");
  if (!(R > 0.0 && h > 0.0)) domain_error("R and h must be > 0", "h");
  n_ = static_cast<int>(std::lround(2.0 * R / h));
  if (std::abs(n_ * h - 2.0 * R) > 1e-9 * R) domain_error("2R must be a multiple of h", "h");
  const int side = n_ + 1;
  if (static_cast<int>(eta.size()) != (m == 1 ? side : side * side))
    domain_error("eta must be sampled on the full (2R/h + 1)^m lattice", "eta");
  lattice_.assign(m == 1 ? side : side * side, -1);
  std::vector<double> values;
  if (m == 1) {
    for (int i = 1; i < n_; ++i) {
      lattice_[i] = static_cast<int>(nodes_.size());
      nodes_.push_back({-R + i * h});
      values.push_back(eta[i]);
    }
    const int sz = size();
    lambda_.resize(sz);
    basis_.resize(static_cast<std::size_t>(sz) * sz);
    const double norm = std::sqrt(2.0 / n_);
    for (int j = 1; j < n_; ++j) {
      const double s = std::sin(0.5 * kPi * j / n_);
      lambda_[j - 1] = 4.0 * s * s / (h * h);
      for (int i = 1; i < n_; ++i) basis_[static_cast<std::size_t>(j - 1) * sz + (i - 1)] = norm * std::sin(kPi * i * j / n_);
    }
  } else {
    for (int j = 0; j < side; ++j)
      for (int i = 0; i < side; ++i) {
        const double x = -R + i * h, y = -R + j * h;
        if (x * x + y * y < R * R * (1 - 1e-12)) {
          lattice_[j * side + i] = static_cast<int>(nodes_.size());
          nodes_.push_back({x, y});
          values.push_back(eta[j * side + i]);
        }
      }
    const int sz = size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(sz, sz);
    for (int j = 0; j < side; ++j)
      for (int i = 0; i < side; ++i) {
        const int c = lattice_[j * side + i];
        if (c < 0) continue;
        A(c, c) = 4.0 / (h * h);
        const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
        for (auto [a, b] : nb) {
          if (a < 0 || b < 0 || a >= side || b >= side) continue;
          const int o = lattice_[b * side + a];
          if (o >= 0) A(c, o) = -1.0 / (h * h);
        }
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw NumericalError(ErrorKind::Solver, "Laplacian eigendecomposition failed", 0.0);
    lambda_.assign(es.eigenvalues().data(), es.eigenvalues().data() + sz);
    basis_.assign(es.eigenvectors().data(), es.eigenvectors().data() + static_cast<std::size_t>(sz) * sz);
  }
  const int sz = size();
  coef_.assign(sz, 0.0);
  for (int j = 0; j < sz; ++j) {
    double c = 0.0;
    for (int i = 0; i < sz; ++i) c += basis_[static_cast<std::size_t>(j) * sz + i] * values[i];
    coef_[j] = c;
  }
}

int HeatLift::index(int i, int j) const {
  const int side = n_ + 1;
  if (i < 0 || i >= side) return -1;
  if (m_ == 1) return lattice_[i];
  if (j < 0 || j >= side) return -1;
  return lattice_[j * side + i];
}

std::vector<double> HeatLift::power(double t, int p) const {
  const int sz = size();
  std::vector<double> c(sz), out(sz, 0.0);
  for (int j = 0; j < sz; ++j) c[j] = coef_[j] * std::exp(-lambda_[j] * t) * std::pow(-lambda_[j], p);
  for (int j = 0; j < sz; ++j) {
    const double* col = &basis_[static_cast<std::size_t>(j) * sz];
    for (int i = 0; i < sz; ++i) out[i] += c[j] * col[i];
  }
  return out;
}

namespace {

double smoothstep_down(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

struct Bump {
  std::vector<double> center;
  double width = 1.0;
  double height = 1.0;
};

std::vector<double> sample_lattice(int m, double R, int n, const std::function<double(std::span<const double>)>& f) {
  const double h = 2.0 * R / n;
  std::vector<double> out;
  if (m == 1) {
    for (int i = 0; i <= n; ++i) {
      const double x[1] = {-R + i * h};
      out.push_back(f(x));
    }
  } else {
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        const double x[2] = {-R + i * h, -R + j * h};
        out.push_back(f(x));
      }
  }
  return out;
}

double rho_R(std::span<const double> x, double R) {
  if (x.size() == 1) return std::cos(0.5 * kPi * x[0] / R);
  constexpr double j01 = 2.404825557695773;
  const double r = std::hypot(x[0], x[1]);
  return r >= R ? 0.0 : boost::math::cyl_bessel_j(0, j01 * r / R);
}

std::vector<double> grad_rho_R(std::span<const double> x, double R) {
  if (x.size() == 1) return {-0.5 * kPi / R * std::sin(0.5 * kPi * x[0] / R)};
  constexpr double j01 = 2.404825557695773;
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0) return {0.0, 0.0};
  const double d = -j01 / R * boost::math::cyl_bessel_j(1, j01 * r / R);
  return {d * x[0] / r, d * x[1] / r};
}

/// Central-difference gradient of a node field; neighbours outside the ball are 0.
std::vector<std::vector<double>> lattice_gradient(const HeatLift& H, const std::vector<double>& w) {
  const int n = H.half_width();
  std::vector<std::vector<double>> g(H.size(), std::vector<double>(H.m(), 0.0));
  const auto val = [&](int i, int j) {
    const int c = H.index(i, j);
    return c < 0 ? 0.0 : w[c];
  };
  for (int j = 0; j <= (H.m() == 1 ? 0 : n); ++j)
    for (int i = 0; i <= n; ++i) {
      const int c = H.index(i, j);
      if (c < 0) continue;
      g[c][0] = (val(i + 1, j) - val(i - 1, j)) / (2.0 * H.h());
      if (H.m() == 2) g[c][1] = (val(i, j + 1) - val(i, j - 1)) / (2.0 * H.h());
    }
  return g;
}

struct LiftNorms {
  double L_norm = 0.0;
  double sup_ratio = 0.0;
};

/// ||L[eta]||_{L^{q'}} with the angular factor of rho_A separated out, and the
/// sup of |Delta zeta| / (rho^R rho_A) on y in (0, 1].
LiftNorms lift_norms(const HeatLift& H, double R, int k, double kappa, double q) {
  const double qc = conjugate(q);
  using GL = boost::math::quadrature::gauss<double, 20>;
  std::vector<std::pair<double, double>> rule;
  for (std::size_t i = 0; i < GL::abscissa().size(); ++i) {
    rule.push_back({GL::abscissa()[i], GL::weights()[i]});
    if (GL::abscissa()[i] != 0.0) rule.push_back({-GL::abscissa()[i], GL::weights()[i]});
  }
  const double cell = std::pow(H.h(), H.m());
  LiftNorms out;
  double acc = 0.0;
  for (auto [xi, wi] : rule) {
    const double y = 0.5 * (xi + 1.0);
    const double t = y * y;
    const std::vector<double> w = H.power(t, 0);
    const std::vector<double> wt = H.power(t, 1);
    const std::vector<double> wtt = H.power(t, 2);
    const auto gw = lattice_gradient(H, w);
    double slice = 0.0;
    for (int c = 0; c < H.size(); ++c) {
      const auto& x = H.nodes()[c];
      const double rho = rho_R(x, R);
      if (!(rho > 0.0)) continue;
      const auto grho = grad_rho_R(x, R);
      double gdot = 0.0, gw2 = 0.0;
      for (int d = 0; d < H.m(); ++d) {
        gdot += grho[d] * gw[c][d];
        gw2 += gw[c][d] * gw[c][d];
      }
      const double lapH = 4.0 * t * wtt[c] + (2.0 * k + 1.0) * wt[c];
      const double base = std::pow(y, kappa) * rho;
      const double cross = 2.0 * kappa * std::pow(y, kappa) * rho * wt[c] + std::pow(y, kappa) * gdot;
      const double L = std::pow(base, 1.0 / qc) * std::abs(lapH) + 2.0 * std::pow(base, -1.0 / q) * std::abs(cross);
      slice += std::pow(L, qc) * cell;
      const double Hv = std::max(w[c], 0.0);
      if (Hv > 0.0) {
        const double grad2 = 4.0 * t * wt[c] * wt[c] + gw2;
        const double lz = qc * std::pow(Hv, qc - 1.0) * (lapH + 4.0 * kappa * wt[c] + 2.0 * gdot / rho) +
                          qc * (qc - 1.0) * std::pow(Hv, qc - 2.0) * grad2;
        out.sup_ratio = std::max(out.sup_ratio, std::abs(lz));
      }
    }
    acc += 0.5 * wi * std::pow(y, k - 1.0) * slice;
  }
  out.L_norm = std::pow(acc, 1.0 / qc);
  return out;
}

SampledFunction as_sampled(int m, double R, int n, const std::vector<double>& values) {
  SampledFunction f;
  f.dim = m;
  f.h = 2.0 * R / n;
  f.shape = m == 1 ? std::vector<int>{n + 1} : std::vector<int>{n + 1, n + 1};
  f.origin = std::vector<double>(m, -R);
  f.values = values;
  return f;
}

}  // namespace

ExperimentReport heat_lifting(const HeatConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.divisions.size() < 2) throw ValidationError(ErrorKind::Configuration, "need at least two grids", "divisions");
  for (int d : cfg.divisions)
    if (d < 8 || d % 8 != 0) throw ValidationError(ErrorKind::Configuration, "divisions must be multiples of 8", "divisions");
  const int m = cfg.m, k = cfg.k;
  const double R = cfg.R;
  const ExponentReport rep = critical_exponents(k + m, k, cfg.gamma);
  const double kappa = rep.kappa_plus;
  const auto plateau = [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return smoothstep_down((std::sqrt(r2) - 0.25 * R) / (0.25 * R));
  };

  ExperimentReport r;
  r.name = "heat_lifting";
  r.parameters = {{"k", std::to_string(k)}, {"m", std::to_string(m)}, {"R", num(R)},
                  {"gamma", num(cfg.gamma)}, {"q", num(cfg.q)},     {"seed", std::to_string(cfg.seed)}};

  // (a) maximum principle and initial trace on the finest grid
  const int nf = 2 * cfg.divisions.back();
  const std::vector<double> eta_f = sample_lattice(m, R, nf, plateau);
  const HeatLift fine(m, R, 2.0 * R / nf, eta_f);
  const double eta_max = *std::max_element(eta_f.begin(), eta_f.end());
  double overshoot = 0.0, init_err = 0.0;
  for (double t : {0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const std::vector<double> w = fine.w(t);
    for (int c = 0; c < fine.size(); ++c) {
      overshoot = std::max({overshoot, w[c] - eta_max, -w[c]});
      if (t == 0.0) {
        const auto& x = fine.nodes()[c];
        init_err = std::max(init_err, std::abs(w[c] - plateau(x)));
      }
    }
  }
  r.metrics.push_back(make_metric("max_principle_overshoot", overshoot, overshoot <= cfg.overshoot_tol));
  r.metrics.push_back(make_metric("initial_trace_error", init_err, init_err <= 1e-12));

  // (b) Laplacian identity against a finite-difference Laplacian in R^N
  std::vector<double> hs, res, res_printed;
  for (int div : cfg.divisions) {
    const int n = 2 * div;
    const double h = 2.0 * R / n;
    const HeatLift H(m, R, h, sample_lattice(m, R, n, plateau));
    double worst = 0.0, worst_printed = 0.0;
    const int mid = n / 2;
    const std::vector<std::pair<int, int>> spots = {{mid, mid}, {mid + n / 8, mid}, {mid - 3 * n / 16, mid + n / 16}};
    for (double y : {0.5, 1.0}) {
      const std::vector<double> w0 = H.power(y * y, 0);
      const std::vector<double> wt = H.power(y * y, 1);
      const std::vector<double> wtt = H.power(y * y, 2);
      const std::vector<double> wp = H.power((y + h) * (y + h), 0);
      const std::vector<double> wm = H.power((y - h) * (y - h), 0);
      const std::vector<double> ws = H.power(y * y + h * h, 0);
      for (auto [i, j] : spots) {
        const int c = H.index(i, m == 1 ? 0 : j);
        if (c < 0) continue;
        double lap = (wp[c] - 2.0 * w0[c] + wm[c]) / (h * h);
        lap += (k - 1) * 2.0 * (ws[c] - w0[c]) / (h * h);
        const auto val = [&](int a, int b) {
          const int o = H.index(a, m == 1 ? 0 : b);
          return o < 0 ? 0.0 : w0[o];
        };
        lap += (val(i + 1, j) - 2.0 * w0[c] + val(i - 1, j)) / (h * h);
        if (m == 2) lap += (val(i, j + 1) - 2.0 * w0[c] + val(i, j - 1)) / (h * h);
        const double rhs = 4.0 * y * y * wtt[c] + (2.0 * k + 1.0) * wt[c];
        const double printed = 2.0 * y * y * wtt[c] + (k + 1.0) * wt[c];
        worst = std::max(worst, std::abs(lap - rhs));
        worst_printed = std::max(worst_printed, std::abs(lap - printed));
      }
    }
    hs.push_back(h);
    res.push_back(worst);
    res_printed.push_back(worst_printed);
  }
  for (std::size_t i = 0; i < res.size(); ++i) r.metrics.push_back(make_metric("identity_residual_h=" + num(hs[i]), res[i]));
  for (std::size_t i = 0; i + 1 < res.size(); ++i) {
    const double o = std::log(res[i] / res[i + 1]) / std::log(hs[i] / hs[i + 1]);
    r.metrics.push_back(make_metric("identity_order_" + std::to_string(i + 1), o,
                                    std::abs(o - cfg.order_target) <= cfg.order_slack));
  }
  r.metrics.push_back(make_metric("printed_form_residual", res_printed.back()));

  // (c) ||L[eta]||_{q'} / ||eta||_{W^{s,q'}} over a bump family, (d) sup-ratio
  const double s = rep.s(cfg.q);
  const int nc = 2 * cfg.divisions.back();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> ratios;
  double sup_ratio = 0.0;
  for (int f = 0; f < cfg.family_size; ++f) {
    Bump b;
    b.width = R * (0.125 + 0.125 * unit(rng));
    b.height = 0.5 + 0.5 * (1.0 - unit(rng));
    b.center.resize(m);
    for (;;) {
      double r2 = 0.0;
      for (auto& c : b.center) {
        c = 0.25 * R * (2.0 * unit(rng) - 1.0);
        r2 += c * c;
      }
      if (r2 <= 0.0625 * R * R) break;
    }
    const auto bump = [&](std::span<const double> x) {
      double d2 = 0.0;
      for (int d = 0; d < m; ++d) d2 += (x[d] - b.center[d]) * (x[d] - b.center[d]);
      const double u2 = d2 / (b.width * b.width);
      return u2 >= 1.0 ? 0.0 : b.height * std::pow(1.0 - u2, 3);
    };
    const std::vector<double> eta = sample_lattice(m, R, nc, bump);
    const HeatLift H(m, R, 2.0 * R / nc, eta);
    const LiftNorms ln = lift_norms(H, R, k, kappa, cfg.q);
    const double en = besov_pos_norm(as_sampled(m, R, nc, eta), s, conjugate(cfg.q));
    ratios.push_back(ln.L_norm / en);
  }
  {
    const LiftNorms ln = lift_norms(fine, R, k, kappa, cfg.q);
    sup_ratio = ln.sup_ratio;
  }
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  const double spread = sorted.back() / median;
  r.metrics.push_back(make_metric("lift_ratio_max_over_median", spread, spread <= cfg.ratio_spread_bound));
  r.metrics.push_back(make_metric("lift_ratio_median", median));
  r.metrics.push_back(make_metric("laplacian_zeta_sup_ratio", sup_ratio));
  r.raw["h"] = hs;
  r.raw["identity_residual"] = res;
  r.raw["printed_residual"] = res_printed;
  r.raw["lift_ratios"] = ratios;
  r.verdict = "checked";
  finish(r, t0);
  return r;
}

}  // namespace dihedral
