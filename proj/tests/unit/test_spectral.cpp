#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dihedral/error.hpp"
#include "dihedral/spectral.hpp"
#include "oracles.hpp"

using namespace dihedral;

TEST_CASE("Dirichlet stage against the Sturm oracle") {
  const double expected = oracle::sl_dirichlet_extrapolated(kPi / 4, kPi / 2, 1, 4.0);
  CHECK(expected == doctest::Approx(20.27852117).epsilon(1e-8));
  SLProblem p;
  p.a = kPi / 4;
  p.b = kPi / 2;
  p.d = 1;
  p.mu = 4.0;
  const auto r = sl_eigen_1d(p);
  CHECK(r.gamma == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("more Dirichlet stages against the oracle") {
  struct Case {
    double a, b;
    int d;
    double mu;
  };
  for (const Case c : {Case{0.3, 1.9, 1, 1.0}, Case{kPi / 3, 2 * kPi / 3, 2, 9.0}, Case{0.5, 2.5, 0, 0.0}}) {
    SLProblem p;
    p.a = c.a;
    p.b = c.b;
    p.d = c.d;
    p.mu = c.mu;
    const double expected = oracle::sl_dirichlet_extrapolated(c.a, c.b, c.d, c.mu, 4000);
    CHECK(sl_eigen_1d(p).gamma == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("flat interval with d = 0 is the sine mode") {
  SLProblem p;
  p.a = 0.5;
  p.b = 2.5;
  p.d = 0;
  p.mu = 0.0;
  CHECK(sl_eigen_1d(p).gamma == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-8));
}

TEST_CASE("bounded pole with d = 1, mu = 0 on the upper hemisphere") {
  SLProblem p;
  p.a = 0.0;
  p.b = kPi / 2;
  p.d = 1;
  p.mu = 0.0;
  p.left = EndpointKind::Bounded;
  const auto r = sl_eigen_1d(p);
  CHECK(r.gamma == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(r(kPi / 3) / r(0.1) == doctest::Approx(std::cos(kPi / 3) / std::cos(0.1)).epsilon(1e-5));
}

TEST_CASE("right wedge and octant openings") {
  WedgeSpec w;
  w.N = 3;
  w.k = 2;
  w.alpha1 = kPi / 2;
  CHECK(gamma_first_eigenvalue(w) == doctest::Approx(4.0).epsilon(1e-10));
  w.alpha1 = 3 * kPi / 4;
  CHECK(gamma_first_eigenvalue(w) == doctest::Approx(16.0 / 9.0).epsilon(1e-10));
  WedgeSpec oct;
  oct.N = 3;
  oct.k = 3;
  oct.alpha1 = kPi / 2;
  oct.intervals = {{0.0, kPi / 2}};
  oct.pole_endpoints = true;
  CHECK(gamma_first_eigenvalue(oct) == doctest::Approx(12.0).epsilon(1e-7));
}

TEST_CASE("wedge box opening chains the stages") {
  WedgeSpec w;
  w.N = 3;
  w.k = 3;
  w.alpha1 = kPi / 2;
  w.intervals = {{kPi / 4, kPi / 2}};
  const double expected = oracle::sl_dirichlet_extrapolated(kPi / 4, kPi / 2, 1, 4.0);
  CHECK(gamma_first_eigenvalue(w) == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("eigenfunction is positive, normalized, zero at Dirichlet ends") {
  SLProblem p;
  p.a = 0.4;
  p.b = 2.0;
  p.d = 1;
  p.mu = 2.0;
  const auto r = sl_eigen_1d(p);
  double mx = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double t = p.a + (p.b - p.a) * i / 200.0;
    CHECK(r(t) > 0.0);
    mx = std::max(mx, r(t));
  }
  CHECK(mx == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(r(p.a)) < 1e-8);
  CHECK(std::abs(r(p.b)) < 1e-8);
  CHECK(r(p.b + 0.1) == 0.0);
}

TEST_CASE("domain monotonicity on random nested intervals") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, kPi - 0.1);
  for (int i = 0; i < 12; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 0.2) continue;
    SLProblem outer;
    outer.a = a;
    outer.b = b;
    outer.d = 1 + i % 2;
    outer.mu = 1.0 + i;
    SLProblem inner = outer;
    inner.a = a + 0.05;
    inner.b = b - 0.05;
    CHECK(sl_eigen_1d(inner).gamma > sl_eigen_1d(outer).gamma);
  }
}

TEST_CASE("opening mode vanishes outside and peaks at 1") {
  WedgeSpec w;
  w.N = 3;
  w.k = 2;
  w.alpha1 = kPi / 2;
  const auto mode = opening_mode(w);
  const std::vector<double> mid{kPi / 4};
  CHECK(mode.omega_prime(mid) == doctest::Approx(1.0));
  const std::vector<double> out{kPi};
  CHECK(mode.omega_prime(out) == 0.0);
  const std::vector<double> xp{1.0, 1.0};
  CHECK(mode.omega_prime_at(xp) == doctest::Approx(1.0));
}

TEST_CASE("invalid problems") {
  SLProblem p;
  p.a = 1.0;
  p.b = 0.5;
  CHECK_THROWS_AS(validate_problem(p), ValidationError);
  p.a = 0.5;
  p.b = 1.0;
  p.left = EndpointKind::Bounded;
  CHECK_THROWS_AS(validate_problem(p), ValidationError);
}
