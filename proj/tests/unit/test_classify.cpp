#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dihedral/classify.hpp"
#include "dihedral/error.hpp"

using namespace dihedral;

namespace {
WedgeSpec wedge(double alpha) {
  WedgeSpec w;
  w.N = 3;
  w.k = 2;
  w.alpha1 = alpha;
  return w;
}

PolyhedronSpec cube() {
  PolyhedronSpec p;
  p.N = 3;
  for (int i = 1; i <= 6; ++i) p.strata.push_back({"face" + std::to_string(i), 1, std::monostate{}});
  for (int i = 1; i <= 12; ++i) p.strata.push_back({"edge" + std::to_string(i), 2, wedge(kPi / 2)});
  WedgeSpec v;
  v.N = 3;
  v.k = 3;
  v.alpha1 = kPi / 2;
  v.intervals = {{0.0, kPi / 2}};
  v.pole_endpoints = true;
  for (int i = 1; i <= 8; ++i) p.strata.push_back({"vertex" + std::to_string(i), 3, v});
  return p;
}

SetPiece point(const std::string& stratum, std::vector<double> z) {
  SetPiece p;
  p.stratum = stratum;
  p.kind = PieceKind::Point;
  p.center = std::move(z);
  return p;
}
}  // namespace

TEST_CASE("cube exponent table") {
  const auto reps = polyhedron_exponents(cube());
  CHECK(reps.size() == 26);
  for (const auto& [id, r] : reps) {
    if (id.rfind("face", 0) == 0) {
      CHECK(r.q_c == doctest::Approx(2.0));
      CHECK(std::isinf(r.q_c_star));
    } else if (id.rfind("edge", 0) == 0) {
      CHECK(r.gamma == doctest::Approx(4.0).epsilon(1e-10));
      CHECK(r.q_c == doctest::Approx(5.0 / 3.0).epsilon(1e-10));
      CHECK(r.q_c_star == doctest::Approx(2.0).epsilon(1e-10));
    } else {
      CHECK(r.gamma == doctest::Approx(12.0).epsilon(1e-7));
      CHECK(r.q_c == doctest::Approx(1.5).epsilon(1e-8));
    }
  }
}

TEST_CASE("regimes of the right edge") {
  const Stratum e{"e", 2, wedge(kPi / 2)};
  CHECK(stratum_verdict(3, e, 1.5).regime == Regime::Subcritical);
  const auto mid = stratum_verdict(3, e, 1.8);
  CHECK(mid.regime == Regime::CapacityRegime);
  REQUIRE(mid.s.has_value());
  CHECK(*mid.s == doctest::Approx(2.0 - 4.0 * 0.8 / 1.8));
  CHECK(stratum_verdict(3, e, 2.0).regime == Regime::RemovableStratum);
  CHECK(stratum_verdict(3, e, 5.0 / 3.0).warning.has_value());
  const Stratum v{"v", 3, GammaOpening{12.0}};
  CHECK(stratum_verdict(3, v, 1.4).regime == Regime::Subcritical);
  CHECK(stratum_verdict(3, v, 1.5).regime == Regime::VertexSupercritical);
  const Stratum f{"f", 1, std::monostate{}};
  CHECK(stratum_verdict(3, f, 50.0).regime == Regime::CapacityRegime);
  CHECK_THROWS_AS(stratum_verdict(3, f, 1.0), ValidationError);
}

TEST_CASE("point removability on the cube") {
  const auto poly = cube();
  CompactSetDescription E{{point("vertex1", {})}};
  CHECK(removable_check(poly, E, 1.5).decision == Decision::Accept);
  CHECK(removable_check(poly, E, 1.4).decision == Decision::Reject);
  E = {{point("edge3", {0.2})}};
  CHECK(removable_check(poly, E, 1.7).decision == Decision::Accept);
  CHECK(removable_check(poly, E, 1.6).decision == Decision::Reject);
  SetPiece seg;
  seg.stratum = "edge3";
  seg.kind = PieceKind::Ball;
  seg.center = {0.0};
  seg.radius = 0.5;
  seg.intrinsic_dim = 1;
  E = {{seg}};
  CHECK(removable_check(poly, E, 1.7).decision == Decision::Reject);
  CHECK(removable_check(poly, E, 2.0).decision == Decision::Accept);
}

TEST_CASE("good measures on the cube") {
  const auto poly = cube();
  StratumMeasures mu;
  mu["vertex2"] = DiscreteMeasure{0, {{{}, 1.0}}};
  CHECK(good_measure_check(poly, mu, 1.4).decision == Decision::Accept);
  CHECK(good_measure_check(poly, mu, 1.6).decision == Decision::Reject);
  mu.clear();
  mu["edge1"] = DiscreteMeasure{1, {{{0.1}, 1.0}}};
  CHECK(good_measure_check(poly, mu, 1.6).decision == Decision::Accept);
  CHECK(good_measure_check(poly, mu, 1.7).decision == Decision::Reject);
  CHECK(good_measure_check(poly, StratumMeasures{}, 3.0).decision == Decision::Accept);
}

TEST_CASE("evidence overrides the analytic fallback") {
  const auto poly = cube();
  StratumMeasures mu;
  mu["edge1"] = DiscreteMeasure{1, {{{0.0}, 1.0}, {{0.5}, 1.0}}};
  SetPiece grid;
  grid.stratum = "edge1";
  grid.kind = PieceKind::Grid;
  grid.points = {{0.0}, {0.5}};
  CapacityEvidence ev{{grid, NullTest::Positive}};
  CHECK(good_measure_check(poly, mu, 1.7, ev).decision == Decision::Accept);
  ev = {{grid, NullTest::NeedsNumeric}};
  CHECK(good_measure_check(poly, mu, 1.7, ev).decision == Decision::NeedsNumeric);
}

TEST_CASE("finite grids of null points are null") {
  const auto rep = critical_exponents(3, 2, 4.0);
  SetPiece grid;
  grid.stratum = "edge1";
  grid.kind = PieceKind::Grid;
  grid.points = {{0.0}, {0.25}, {0.5}};
  CHECK(numeric_evidence(grid, rep, 1.7) == NullTest::Null);
  CHECK(numeric_evidence(grid, rep, 1.6) == NullTest::Positive);
}

TEST_CASE("property: removability is monotone in q") {
  const auto poly = cube();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> qd(1.05, 3.5), zd(-1.0, 1.0);
  const char* ids[] = {"face1", "edge1", "vertex1"};
  for (int t = 0; t < 150; ++t) {
    const std::string id = ids[t % 3];
    const int m = poly.edge_dim(poly.at(id));
    std::vector<double> z(m);
    for (auto& c : z) c = zd(rng);
    CompactSetDescription E{{point(id, z)}};
    double q1 = qd(rng), q2 = qd(rng);
    if (q1 > q2) std::swap(q1, q2);
    if (removable_check(poly, E, q1).decision == Decision::Accept)
      CHECK(removable_check(poly, E, q2).decision == Decision::Accept);
  }
}

TEST_CASE("property: goodness is antitone in q and dual to removability of atoms") {
  const auto poly = cube();
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> qd(1.05, 3.5), zd(-1.0, 1.0), wd(0.1, 3.0);
  const char* ids[] = {"face2", "edge5", "vertex4"};
  for (int t = 0; t < 150; ++t) {
    const std::string id = ids[t % 3];
    const int m = poly.edge_dim(poly.at(id));
    std::vector<double> z(m);
    for (auto& c : z) c = zd(rng);
    StratumMeasures mu;
    mu[id] = DiscreteMeasure{m, {{z, wd(rng)}}};
    double q1 = qd(rng), q2 = qd(rng);
    if (q1 > q2) std::swap(q1, q2);
    const auto good2 = good_measure_check(poly, mu, q2).decision;
    if (good2 == Decision::Accept) CHECK(good_measure_check(poly, mu, q1).decision == Decision::Accept);
    CompactSetDescription E{{point(id, z)}};
    const bool removable = removable_check(poly, E, q2).decision == Decision::Accept;
    CHECK(removable == (good2 == Decision::Reject));
  }
}

TEST_CASE("property: subsets of removable sets are removable") {
  const auto poly = cube();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> qd(1.05, 3.5);
  for (int t = 0; t < 60; ++t) {
    const double q = qd(rng);
    SetPiece ball;
    ball.stratum = "face3";
    ball.kind = PieceKind::Ball;
    ball.center = {0.0, 0.0};
    ball.radius = 0.3;
    ball.intrinsic_dim = 1;
    const bool big = removable_check(poly, {{ball}}, q).decision == Decision::Accept;
    const bool small = removable_check(poly, {{point("face3", {0.1, 0.0})}}, q).decision == Decision::Accept;
    if (big) CHECK(small);
  }
}

TEST_CASE("flat edge and face agree on point removability") {
  PolyhedronSpec p;
  p.N = 3;
  p.strata = {{"face", 1, std::monostate{}}, {"flat", 2, wedge(kPi)}};
  for (double q : {1.5, 1.9, 1.99, 2.0, 2.01, 2.5, 2.9}) {
    const bool face = removable_check(p, {{point("face", {0.0, 0.0})}}, q).decision == Decision::Accept;
    const bool flat = removable_check(p, {{point("flat", {0.0})}}, q).decision == Decision::Accept;
    CHECK(face == flat);
    CHECK(face == (q >= 2.0));
  }
}

TEST_CASE("unknown strata are reference errors") {
  StratumMeasures mu;
  mu["nope"] = DiscreteMeasure{1, {}};
  CHECK_THROWS_AS(good_measure_check(cube(), mu, 1.5), ValidationError);
}
