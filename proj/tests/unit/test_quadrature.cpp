#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dihedral/core.hpp"
#include "dihedral/error.hpp"
#include "dihedral/quadrature.hpp"

using namespace dihedral;

TEST_CASE("smooth integrands") {
  const auto r = integrate([](double x) { return x * x; }, 0.0, 3.0, {});
  CHECK(r.value == doctest::Approx(9.0).epsilon(1e-12));
  const auto s = integrate([](double x) { return std::sin(x); }, 0.0, kPi, {1e-12});
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("breakpoints handle kinks") {
  const std::vector<double> kink{0.3};
  const auto r = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, {}, kink);
  CHECK(r.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-12));
}

TEST_CASE("integrable endpoint singularity") {
  const auto r = integrate_from_zero([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 4.0, {1e-10});
  CHECK(r.value == doctest::Approx(4.0).epsilon(1e-9));
  const auto g = integrate_from_zero([](double x) { return std::pow(x, -0.9); }, 0.0, 1.0, {1e-10});
  CHECK(g.value == doctest::Approx(10.0).epsilon(1e-8));
}

TEST_CASE("semi-infinite ranges") {
  const auto r = integrate([](double x) { return std::exp(-x); }, 2.0, INFINITY, {1e-12});
  CHECK(r.value == doctest::Approx(std::exp(-2.0)).epsilon(1e-11));
  const auto z = integrate_zero_inf([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, {1e-12});
  CHECK(z.value == doctest::Approx(kPi / 2).epsilon(1e-11));
  const auto full = integrate([](double x) { return std::exp(-x * x); }, -INFINITY, INFINITY, {1e-12});
  CHECK(full.value == doctest::Approx(std::sqrt(kPi)).epsilon(1e-11));
}

TEST_CASE("non-finite results raise accuracy errors") {
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, {}), NumericalError);
}
