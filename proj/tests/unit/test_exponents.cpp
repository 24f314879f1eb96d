#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dihedral/error.hpp"
#include "dihedral/exponents.hpp"

using namespace dihedral;

TEST_CASE("right dihedral angle in R^3") {
  const auto r = critical_exponents(3, 2, 4.0);
  CHECK(r.kappa_plus == doctest::Approx(2.0));
  CHECK(r.lambda_A == doctest::Approx(6.0));
  CHECK(r.kappa_minus == doctest::Approx(-3.0));
  CHECK(r.q_c == doctest::Approx(5.0 / 3.0));
  CHECK(r.q_c_star == doctest::Approx(2.0));
  CHECK(r.nu() == doctest::Approx(5.0));
  CHECK(r.s(1.7) == doctest::Approx(2.0 - 4.0 * 0.7 / 1.7).epsilon(1e-14));
  CHECK(r.s(1.7) == doctest::Approx(0.3529411764705882).epsilon(1e-12));
}

TEST_CASE("octant cone") {
  const auto r = critical_exponents(3, 3, 12.0);
  CHECK(r.kappa_plus == doctest::Approx(3.0));
  CHECK(r.kappa_minus == doctest::Approx(-4.0));
  CHECK(r.q_c == doctest::Approx(1.5));
  CHECK(r.q_c_star == doctest::Approx(r.q_c));
  CHECK(std::abs(r.q_c - cone_q_c(3, 12.0)) < 1e-12);
}

TEST_CASE("faces use the half-space values") {
  for (int N = 2; N <= 6; ++N) {
    const auto r = critical_exponents(N, 1, 0.0);
    CHECK(r.kappa_plus == 1.0);
    CHECK(r.lambda_A == doctest::Approx(N - 1.0));
    CHECK(r.q_c == doctest::Approx((N + 1.0) / (N - 1.0)));
    CHECK(std::isinf(r.q_c_star));
  }
}

TEST_CASE("flat edge matches the face critical exponent") {
  const auto edge = critical_exponents(3, 2, 1.0);
  const auto face = critical_exponents(3, 1, 0.0);
  CHECK(edge.kappa_plus == doctest::Approx(1.0));
  CHECK(edge.q_c == doctest::Approx(face.q_c));
}

TEST_CASE("Vieta and the absorption identity on random samples") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> Nd(2, 9);
  std::uniform_real_distribution<double> lam(0.01, 80.0);
  for (int i = 0; i < 100; ++i) {
    const int N = Nd(rng);
    const double l = lam(rng);
    const auto [kp, km] = kappa_roots(N, l);
    CHECK(std::abs((kp + km) - (2.0 - N)) <= 1e-10 * std::max(1.0, std::abs(2.0 - N)));
    CHECK(std::abs(kp * km + l) <= 1e-10 * l);
    CHECK(identity_check(N, l));
  }
}

TEST_CASE("absorption coefficient at q_c equals lambda_A") {
  const double q = cone_q_c(3, 12.0);
  CHECK(absorption_coefficient(3, q) == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(kappa_from_gamma(2, -1.0), ValidationError);
  CHECK_THROWS_AS(critical_exponents(3, 4, 1.0), ValidationError);
  CHECK_THROWS_AS(conjugate(1.0), ValidationError);
  CHECK_THROWS_AS(kappa_roots(3, 0.0), ValidationError);
}

TEST_CASE("conjugate exponent") {
  CHECK(conjugate(2.0) == doctest::Approx(2.0));
  CHECK(conjugate(1.5) == doctest::Approx(3.0));
}
