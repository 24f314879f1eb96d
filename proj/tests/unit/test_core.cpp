#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dihedral/core.hpp"
#include "dihedral/error.hpp"

using namespace dihedral;

TEST_CASE("spherical coordinates round trip") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, kPi - 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    const int N = 2 + trial % 4;
    std::vector<double> sigma(N - 1);
    for (auto& t : sigma) t = u(rng);
    sigma[0] *= 2.0;
    const double r = 0.5 + trial * 0.01;
    const auto x = spherical_to_cartesian(r, sigma);
    REQUIRE(x.size() == static_cast<std::size_t>(N));
    const auto back = cartesian_to_spherical(x);
    CHECK(back.r == doctest::Approx(r).epsilon(1e-13));
    for (int i = 0; i < N - 1; ++i) CHECK(back.sigma[i] == doctest::Approx(sigma[i]).epsilon(1e-12));
  }
}

TEST_CASE("first coordinates follow the sin/cos convention") {
  const std::vector<double> sigma{0.3};
  const auto x = spherical_to_cartesian(2.0, sigma);
  CHECK(x[0] == doctest::Approx(2.0 * std::sin(0.3)));
  CHECK(x[1] == doctest::Approx(2.0 * std::cos(0.3)));
}

TEST_CASE("wedge validation") {
  WedgeSpec w;
  w.N = 3;
  w.k = 2;
  w.alpha1 = kPi / 2;
  CHECK_NOTHROW(validate_wedge(w));
  w.alpha1 = 0.0;
  CHECK_THROWS_AS(validate_wedge(w), ValidationError);
  w.alpha1 = 2.5 * kPi;
  CHECK_THROWS_AS(validate_wedge(w), ValidationError);
  w.alpha1 = 1.0;
  w.k = 4;
  CHECK_THROWS_AS(validate_wedge(w), ValidationError);
  w.k = 3;
  w.intervals = {{0.5, 0.4}};
  CHECK_THROWS_AS(validate_wedge(w), ValidationError);
  w.intervals = {{0.0, 1.0}};
  CHECK_THROWS_AS(validate_wedge(w), ValidationError);
  w.pole_endpoints = true;
  CHECK_NOTHROW(validate_wedge(w));
}

TEST_CASE("measure validation and operations") {
  DiscreteMeasure mu;
  mu.m = 2;
  mu.atoms = {{{0.0, 1.0}, 0.5}, {{3.0, -3.0}, 1.5}};
  CHECK_NOTHROW(validate_measure(mu));
  CHECK(mu.mass() == doctest::Approx(2.0));
  CHECK(mu.scaled(3.0).mass() == doctest::Approx(6.0));
  CHECK(mu.support_radius() == doctest::Approx(std::sqrt(18.0)));
  const std::vector<double> shift{1.0, 1.0};
  const auto moved = mu.translated(shift);
  CHECK(moved.atoms[0].z[0] == doctest::Approx(1.0));
  CHECK(moved.support_diameter() == doctest::Approx(mu.support_diameter()));
  DiscreteMeasure bad = mu;
  bad.atoms[0].w = -1.0;
  CHECK_THROWS_AS(validate_measure(bad), ValidationError);
  bad = mu;
  bad.atoms[1].z = {1.0};
  CHECK_THROWS_AS(validate_measure(bad), ValidationError);
  DiscreteMeasure zero;
  zero.m = 1;
  CHECK(zero.empty());
}

PolyhedronSpec small_poly() {
  PolyhedronSpec p;
  p.N = 3;
  WedgeSpec w;
  w.N = 3;
  w.k = 2;
  w.alpha1 = kPi / 2;
  p.strata = {{"f", 1, std::monostate{}}, {"e", 2, w}, {"v", 3, GammaOpening{12.0}}};
  return p;
}

TEST_CASE("polyhedron references") {
  const PolyhedronSpec p = validate_polyhedron(small_poly());
  CHECK(p.at("e").k == 2);
  CHECK(p.edge_dim(p.at("f")) == 2);
  CHECK(p.find("x") == nullptr);
  CHECK_THROWS_AS(p.at("x"), ValidationError);
  PolyhedronSpec dup = small_poly();
  dup.strata.push_back({"e", 2, GammaOpening{4.0}});
  CHECK_THROWS_AS(validate_polyhedron(dup), ValidationError);
}

TEST_CASE("measure decomposition gives every stratum an entry") {
  const PolyhedronSpec p = small_poly();
  StratumMeasures mu;
  mu["e"] = DiscreteMeasure{1, {{{0.25}, 2.0}}};
  const auto fam = decompose_measure(p, mu);
  CHECK(fam.size() == 3);
  CHECK(fam.at("f").m == 2);
  CHECK(fam.at("f").empty());
  CHECK(fam.at("v").m == 0);
  CHECK(total_mass(fam) == doctest::Approx(2.0));
  StratumMeasures wrong;
  wrong["zzz"] = DiscreteMeasure{1, {{{0.0}, 1.0}}};
  CHECK_THROWS_AS(decompose_measure(p, wrong), ValidationError);
}

TEST_CASE("set validation checks dimensions") {
  const PolyhedronSpec p = small_poly();
  CompactSetDescription E;
  SetPiece piece;
  piece.stratum = "e";
  piece.kind = PieceKind::Point;
  piece.center = {0.0};
  E.pieces.push_back(piece);
  CHECK_NOTHROW(validate_set(p, E));
  E.pieces[0].center = {0.0, 1.0};
  CHECK_THROWS_AS(validate_set(p, E), ValidationError);
  E.pieces[0].center = {};
  E.pieces[0].stratum = "v";
  CHECK_NOTHROW(validate_set(p, E));
}
