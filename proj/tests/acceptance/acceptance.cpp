#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "dihedral/capacity.hpp"
#include "dihedral/classify.hpp"
#include "dihedral/exponents.hpp"
#include "dihedral/json_io.hpp"
#include "dihedral/kernels.hpp"
#include "dihedral/spectral.hpp"
#include "dihedral/verify.hpp"

using namespace dihedral;

namespace {

const std::string kData = DIHEDRAL_DATA_DIR;

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

struct Criterion {
  int id;
  const char* title;
  double time_limit;
  std::function<bool(std::ostringstream&)> check;
};

bool closed_form_eigenvalues(std::ostringstream& log) {
  bool ok = true;
  for (double alpha : {kPi / 3, kPi / 2, kPi, 3 * kPi / 2}) {
    WedgeSpec w;
    w.N = 3;
    w.k = 2;
    w.alpha1 = alpha;
    const double g = gamma_first_eigenvalue(w);
    const double expected = (kPi / alpha) * (kPi / alpha);
    ok &= rel_close(g, expected, 1e-8);
    log << " alpha=" << alpha << " rel_err=" << std::abs(g / expected - 1);
  }
  return ok;
}

bool octant(std::ostringstream& log) {
  WedgeSpec w;
  w.N = 3;
  w.k = 3;
  w.alpha1 = kPi / 2;
  w.intervals = {{0.0, kPi / 2}};
  w.pole_endpoints = true;
  const double g = gamma_first_eigenvalue(w);
  const auto r = critical_exponents(3, 3, g);
  log << " gamma=" << g << " kappa+=" << r.kappa_plus << " kappa-=" << r.kappa_minus << " q_c=" << r.q_c;
  return std::abs(g - 12.0) <= 1e-6 && std::abs(r.kappa_plus - 3.0) <= 1e-6 && std::abs(r.kappa_minus + 4.0) <= 1e-6 &&
         std::abs(r.q_c - 1.5) <= 1e-6 && std::abs(r.q_c - cone_q_c(3, r.lambda_A)) <= 1e-10;
}

bool algebraic_identities(std::ostringstream& log) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> Nd(2, 10);
  std::uniform_real_distribution<double> ld(0.01, 100.0);
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < 50; ++i) {
    const int N = Nd(rng);
    const double l = ld(rng);
    const auto [kp, km] = kappa_roots(N, l);
    const double e1 = std::abs(kp + km - (2.0 - N)) / std::max(1.0, std::abs(2.0 - N));
    const double e2 = std::abs(kp * km + l) / l;
    const double q_c = 1.0 - 2.0 / km;
    const double e3 = std::abs(absorption_coefficient(N, q_c) - l) / l;
    worst = std::max({worst, e1, e2, e3});
    ok &= e1 <= 1e-10 && e2 <= 1e-10 && e3 <= 1e-10 && identity_check(N, l);
  }
  log << " worst_rel=" << worst;
  return ok;
}

bool dichotomy(std::ostringstream& log) {
  DichotomyConfig below, above, two;
  below.q = 5.0 / 3.0 - 0.01;
  above.q = 5.0 / 3.0 + 0.01;
  two.q = 2.0;
  const auto rb = dichotomy_experiment(below);
  const auto ra = dichotomy_experiment(above);
  const auto r2 = dichotomy_experiment(two);
  const double slope = r2.metric("shell_slope").value;
  log << " below=" << rb.verdict << " above=" << ra.verdict << " slope(q=2)=" << slope;
  return rb.verdict == "convergent" && ra.verdict == "divergent" && r2.verdict == "divergent" &&
         std::abs(slope + 1.0) <= 0.05;
}

bool exponent_bookkeeping(std::ostringstream& log) {
  int count = 0;
  double worst = 0.0;
  for (int N = 3; N <= 6; ++N)
    for (int k = 2; k < N; ++k)
      for (double gamma : {0.5, 1.0, 4.0, 9.0, 20.0})
        for (int i = 1; i <= 5 && count < 100; ++i) {
          const auto rep = critical_exponents(N, k, gamma);
          const double q = rep.q_c + (rep.q_c_star - rep.q_c) * i / 6.0;
          const double s = rep.s(q), nu = rep.nu(), m = rep.m();
          const double lhs = (s + nu - m) * q - 1.0;
          const double rhs = (q + 1.0) * rep.kappa_plus + k - 1.0;
          worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
          worst = std::max(worst, std::abs(exponent_identity_residual(rep, q)));
          ++count;
        }
  log << " points=" << count << " worst_rel=" << worst;
  return count == 100 && worst <= 1e-12;
}

bool equivalence(std::ostringstream& log) {
  EquivalenceConfig cfg;
  cfg.threads = 4;
  const auto r = equivalence_experiment(cfg);
  log << " homogeneity_M=" << r.metric("homogeneity_M").value
      << " homogeneity_proxy=" << r.metric("homogeneity_proxy").value << " spread=" << r.metric("ratio_spread").value
      << " R_growth=" << r.metric("R_growth_exponent").value << " bound=" << r.metric("R_growth_bound").value;
  return r.pass;
}

bool remainder_scaling(std::ostringstream& log) {
  const DiscreteMeasure mu{1, {{{0.0}, 1.0}}};
  const auto r = remainder_experiment(mu, RemainderConfig{});
  log << " exponent=" << r.metric("fitted_exponent").value << " bound=" << r.metric("bound").value;
  return r.verdict == "within-bound" && r.pass;
}

bool harmonicity(std::ostringstream& log) {
  HarmonicityConfig right;
  const auto a = harmonicity_experiment(right);
  HarmonicityConfig obtuse;
  obtuse.alpha1 = 3 * kPi / 4;
  const auto b = harmonicity_experiment(obtuse);
  log << " right=" << a.verdict << "(" << a.metric("max_residual").value << ") obtuse=" << b.verdict;
  for (int i = 1; i <= 3; ++i) log << " order_" << i << "=" << b.metric("order_" + std::to_string(i)).value;
  return a.verdict == "exact" && a.pass && b.verdict == "second-order" && b.pass;
}

bool capacity_thresholds(std::ostringstream& log) {
  const auto lo = bessel_capacity({{0.0}}, 1, 0.4, 2.0);
  const auto hi = bessel_capacity({{0.0}}, 1, 0.6, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double x = 0.1 + 0.5 * i;
    const std::vector<double> p{x};
    worst = std::max(worst, std::abs(bessel_kernel(p, 2.0) - 0.5 * std::exp(-x)));
  }
  log << " alpha=0.4:" << to_string(lo.verdict) << " alpha=0.6:" << to_string(hi.verdict) << " G2_err=" << worst;
  return lo.verdict == CapacityVerdict::Vanishing && hi.verdict == CapacityVerdict::Positive && worst <= 1e-8;
}

bool classification(std::ostringstream& log) {
  const auto poly = polyhedron_from_json(read_json_file(kData + "/cube.json"));
  const auto reps = polyhedron_exponents(poly);
  bool ok = true;
  for (const auto& stratum : poly.strata) {
    const auto& r = reps.at(stratum.id);
    const auto v = stratum_verdict(r, stratum.id, 1.7);
    if (stratum.k == 1) {
      ok &= std::abs(r.q_c - 2.0) <= 1e-4 && v.regime == Regime::Subcritical;
    } else if (stratum.k == 2) {
      ok &= std::abs(r.q_c - 5.0 / 3.0) <= 1e-4 && std::abs(r.q_c_star - 2.0) <= 1e-4 &&
            v.regime == Regime::CapacityRegime && v.s && std::abs(*v.s - 0.3529) <= 1e-4;
    } else {
      ok &= std::abs(r.q_c - 1.5) <= 1e-4 && v.regime == Regime::VertexSupercritical;
    }
  }
  const auto edge = stratum_verdict(reps.at("edge1"), "edge1", 1.7);
  const auto vertex = removable_check(poly, set_from_json(read_json_file(kData + "/vertex.json")), 1.5);
  const auto segment = removable_check(poly, set_from_json(read_json_file(kData + "/edge_segment.json")), 1.7);
  log << " strata=" << poly.strata.size() << " edge_s=" << edge.s.value_or(NAN)
      << " vertex_removable=" << (vertex.decision == Decision::Accept)
      << " segment_removable=" << (segment.decision == Decision::Accept);
  return ok && vertex.decision == Decision::Accept && segment.decision == Decision::Reject;
}

bool heat(std::ostringstream& log) {
  const auto r = heat_lifting(HeatConfig{});
  const double over = r.metric("max_principle_overshoot").value;
  const double o1 = r.metric("identity_order_1").value, o2 = r.metric("identity_order_2").value;
  log << " overshoot=" << over << " orders=" << o1 << "," << o2;
  return over <= 1e-12 && std::abs(o1 - 2.0) <= 0.3 && std::abs(o2 - 2.0) <= 0.3;
}

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "closed-form wedge eigenvalues", 1.0, closed_form_eigenvalues},
      {2, "octant cone exponents", 5.0, octant},
      {3, "Vieta and absorption identities", 60.0, algebraic_identities},
      {4, "Dirac dichotomy at the right edge", 30.0, dichotomy},
      {5, "exponent bookkeeping", 60.0, exponent_bookkeeping},
      {6, "kernel/Besov equivalence properties", 300.0, equivalence},
      {7, "remainder scaling", 120.0, remainder_scaling},
      {8, "harmonicity of the wedge eigenmode", 60.0, harmonicity},
      {9, "Bessel capacity thresholds", 120.0, capacity_thresholds},
      {10, "cube classification table", 60.0, classification},
      {11, "heat lifting", 120.0, heat},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    std::ostringstream log;
    log.precision(6);
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.check(log);
    } catch (const std::exception& e) {
      log << " exception: " << e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > c.time_limit) {
      ok = false;
      log << " over time limit " << c.time_limit << " s";
    }
    std::printf("%s %2d %s (%.2f s)%s\n", ok ? "PASS" : "FAIL", c.id, c.title, dt, log.str().c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
