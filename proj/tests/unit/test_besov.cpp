#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dihedral/besov.hpp"
#include "dihedral/error.hpp"
#include "oracles.hpp"

using namespace dihedral;

namespace {
SampledFunction tent(int per_unit) {
  SampledFunction f;
  f.dim = 1;
  f.h = 1.0 / per_unit;
  const int n = 2 * per_unit + 1;
  f.shape = {n};
  f.origin = {-1.0};
  for (int i = 0; i < n; ++i) f.values.push_back(std::max(0.0, 1.0 - std::abs(-1.0 + i * f.h)));
  return f;
}

const DiscreteMeasure delta0{1, {{{0.0}, 1.0}}};
}  // namespace

TEST_CASE("Poisson normalization") {
  CHECK(gamma_n(2) == doctest::Approx(1.0 / kPi));
  CHECK(gamma_n(3) == doctest::Approx(0.5 / kPi));
}

TEST_CASE("tent norm against the Gagliardo oracle") {
  const auto f = tent(512);
  for (double s : {0.25, 0.5, 0.75}) {
    const double expected = std::sqrt(oracle::tent_norm_sq(s));
    CHECK(besov_pos_norm_raw(f, s, 2.0) == doctest::Approx(expected).epsilon(1e-3));
  }
}

TEST_CASE("positive norm passes the refinement check on a fine grid") {
  const auto r = besov_pos_norm_checked(tent(256), 0.5, 2.0);
  CHECK(r.delta < 0.05);
  CHECK(r.coarse_value > 0.0);
}

TEST_CASE("coarse grids raise a resolution error") {
  SampledFunction f;
  f.dim = 1;
  f.h = 0.5;
  f.shape = {5};
  f.origin = {-1.0};
  f.values = {0.0, 1.0, 0.0, 1.0, 0.0};
  CHECK_THROWS_AS(besov_pos_norm(f, 0.9, 2.0), NumericalError);
}

TEST_CASE("coarsening keeps every other sample") {
  const auto c = coarsen(tent(4));
  CHECK(c.shape[0] == 5);
  CHECK(c.h == doctest::Approx(0.5));
  CHECK(c.at(2) == doctest::Approx(1.0));
  CHECK(c.at(-1) == 0.0);
}

TEST_CASE("two-dimensional norm is finite and scales") {
  SampledFunction f;
  f.dim = 2;
  f.h = 1.0 / 32;
  const int n = 65;
  f.shape = {n, n};
  f.origin = {-1.0, -1.0};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + i * f.h, y = -1.0 + j * f.h;
      f.values.push_back(std::max(0.0, 1.0 - std::abs(x)) * std::max(0.0, 1.0 - std::abs(y)));
    }
  const double a = besov_pos_norm_raw(f, 0.5, 2.0);
  for (auto& v : f.values) v *= 3.0;
  CHECK(besov_pos_norm_raw(f, 0.5, 2.0) == doctest::Approx(3.0 * a).epsilon(1e-12));
}

TEST_CASE("proxy converges above the atom threshold and diverges below") {
  const auto conv = besov_neg_proxy(delta0, 0.75, 2.0, 1e-3);
  CHECK_FALSE(conv.divergent);
  const auto div = besov_neg_proxy(delta0, 0.25, 2.0, 1e-3);
  CHECK(div.divergent);
  CHECK(div.fit.slope == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("proxy homogeneity and translation invariance") {
  const DiscreteMeasure mu{1, {{{0.0}, 1.0}, {{0.5}, 0.5}}};
  const double base = besov_proxy_value(mu, 0.75, 1.5, 1e-2);
  CHECK(besov_proxy_value(mu.scaled(2.0), 0.75, 1.5, 1e-2) == doctest::Approx(std::pow(2.0, 1.5) * base).epsilon(1e-5));
  const std::vector<double> shift{3.0};
  CHECK(besov_proxy_value(mu.translated(shift), 0.75, 1.5, 1e-2) == doctest::Approx(base).epsilon(1e-5));
}

TEST_CASE("proxy domain errors") {
  CHECK_THROWS_AS(besov_proxy_value(delta0, 0.0, 2.0, 1e-2), ValidationError);
  CHECK_THROWS_AS(besov_proxy_value(delta0, 0.5, 1.0, 1e-2), ValidationError);
  CHECK_THROWS_AS(besov_proxy_value(delta0, 0.5, 2.0, 2.0), ValidationError);
}
