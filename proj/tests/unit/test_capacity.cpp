#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dihedral/capacity.hpp"
#include "dihedral/error.hpp"
#include "oracles.hpp"

using namespace dihedral;

TEST_CASE("Bessel kernel of order 1 on the line is K0 / pi") {
  for (double x : {0.05, 0.3, 1.0, 4.0}) {
    const std::vector<double> p{x};
    CHECK(bessel_kernel(p, 1.0) == doctest::Approx(oracle::bessel_G1_1d(x)).epsilon(1e-7));
    CHECK(bessel_kernel_radial(x, 1.0, 1) == doctest::Approx(oracle::bessel_G1_1d(x)).epsilon(1e-10));
  }
}

TEST_CASE("Bessel kernel of order 2 on the line is exp(-|x|) / 2") {
  for (double x : {0.0, 0.5, 2.0, 10.0}) {
    CHECK(bessel_kernel_radial(x, 2.0, 1) == doctest::Approx(0.5 * std::exp(-x)).epsilon(1e-12));
    const std::vector<double> p{x};
    if (x > 0.0) CHECK(bessel_kernel(p, 2.0) == doctest::Approx(0.5 * std::exp(-x)).epsilon(1e-7));
  }
}

TEST_CASE("Bessel kernel in the plane matches the radial form") {
  for (double a : {0.8, 1.5, 3.0}) {
    const std::vector<double> p{0.3, 0.4};
    CHECK(bessel_kernel(p, a) == doctest::Approx(bessel_kernel_radial(0.5, a, 2)).epsilon(1e-7));
  }
  CHECK(bessel_kernel_radial(800.0, 1.0, 2) == 0.0);
}

TEST_CASE("Bessel kernel has unit mass on the line") {
  double total = 0.0;
  const int n = 40000;
  const double h = 40.0 / n;
  for (int i = 0; i < n; ++i) total += 2.0 * h * bessel_kernel_radial((i + 0.5) * h, 1.5, 1);
  CHECK(total == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("grid refines toward the points") {
  const auto g = build_capacity_grid({{0.0}}, 1, 1e-3);
  CHECK(g.size() > 0);
  CHECK(g.h_min <= 1e-3);
  double smallest = INFINITY, total = 0.0;
  for (double s : g.sizes) {
    smallest = std::min(smallest, s);
    total += s;
  }
  CHECK(smallest <= 1e-3);
  CHECK(total == doctest::Approx(24.0).epsilon(1e-9));
}

TEST_CASE("point capacity vanishes iff alpha p <= l") {
  const auto v = bessel_capacity({{0.3}}, 1, 0.4, 2.0);
  CHECK(v.verdict == CapacityVerdict::Vanishing);
  const auto p = bessel_capacity({{0.3}}, 1, 0.6, 2.0);
  CHECK(p.verdict == CapacityVerdict::Positive);
  CHECK(p.value > 0.3);
  for (const auto& step : p.history) CHECK(step.gap <= 1e-6 * std::max(1.0, step.value) + 1e-9);
}

TEST_CASE("capacity is monotone in the set") {
  CapacityGrid g = build_capacity_grid({{0.0}, {1.0}}, 1, 1e-2);
  const auto one = bessel_capacity_on_grid({{0.0}}, 0.8, 2.0, g);
  const auto two = bessel_capacity_on_grid({{0.0}, {1.0}}, 0.8, 2.0, g);
  CHECK(two.value >= one.value * (1 - 1e-5));
  CHECK(two.value <= 2.0 * one.value * (1 + 1e-5));
}

TEST_CASE("verdict rule") {
  CHECK(judge({{1e-1, 0.1, 0}, {1e-2, 0.03, 0}, {1e-3, 0.005, 0}}) == CapacityVerdict::Vanishing);
  CHECK(judge({{1e-1, 0.6, 0}, {1e-2, 0.58, 0}, {1e-3, 0.57, 0}}) == CapacityVerdict::Positive);
}

TEST_CASE("rho capacity of an edge point") {
  const auto rep = critical_exponents(3, 2, 4.0);
  CHECK(rho_capacity({{0.0}}, rep, 1.5, 8.0).verdict == CapacityVerdict::Positive);
  CHECK(rho_capacity({{0.0}}, rep, 2.0, 8.0).verdict == CapacityVerdict::Vanishing);
}

TEST_CASE("analytic null tests") {
  SetPiece pt;
  pt.kind = PieceKind::Point;
  CHECK(capacity_null_test(pt, 0.5, 2.0, 1) == NullTest::Null);
  CHECK(capacity_null_test(pt, 0.6, 2.0, 1) == NullTest::Positive);
  SetPiece ball;
  ball.kind = PieceKind::Ball;
  ball.intrinsic_dim = 1;
  CHECK(capacity_null_test(ball, 0.4, 2.0, 2) == NullTest::Null);
  CHECK(capacity_null_test(ball, 0.6, 2.0, 2) == NullTest::Positive);
  ball.intrinsic_dim = 2;
  CHECK(capacity_null_test(ball, 0.01, 2.0, 2) == NullTest::Positive);
  SetPiece grid;
  grid.kind = PieceKind::Grid;
  CHECK(capacity_null_test(grid, 0.4, 2.0, 1) == NullTest::Null);
  grid.points = {{0.0}, {0.5}};
  CHECK(capacity_null_test(grid, 0.4, 2.0, 1) == NullTest::NeedsNumeric);
  CHECK(capacity_null_test(grid, 0.6, 2.0, 1) == NullTest::Positive);
}
