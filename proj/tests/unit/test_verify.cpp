#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dihedral/verify.hpp"

using namespace dihedral;

TEST_CASE("dichotomy of the Dirac mass on the right edge") {
  for (double q : {1.5, 1.6}) {
    DichotomyConfig cfg;
    cfg.q = q;
    const auto r = dichotomy_experiment(cfg);
    CHECK(r.verdict == "convergent");
    CHECK(r.pass);
  }
  for (double q : {1.8, 2.0}) {
    DichotomyConfig cfg;
    cfg.q = q;
    const auto r = dichotomy_experiment(cfg);
    CHECK(r.verdict == "divergent");
    CHECK(r.pass);
  }
}

TEST_CASE("random measure family is reproducible and inside the ball") {
  const auto a = random_measure_family(1, 5, 2.0, 42);
  const auto b = random_measure_family(1, 5, 2.0, 42);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].atoms.size() == b[i].atoms.size());
    CHECK(a[i].atoms.size() >= 1);
    CHECK(a[i].atoms.size() <= 10);
    for (std::size_t j = 0; j < a[i].atoms.size(); ++j) {
      CHECK(a[i].atoms[j].z == b[i].atoms[j].z);
      CHECK(a[i].atoms[j].w > 0.0);
      CHECK(a[i].atoms[j].w <= 1.0);
      CHECK(std::abs(a[i].atoms[j].z[0]) <= 2.0);
    }
  }
  const auto c = random_measure_family(1, 5, 2.0, 43);
  CHECK(c[0].atoms[0].z != a[0].atoms[0].z);
}

TEST_CASE("equivalence on a small family") {
  EquivalenceConfig cfg;
  cfg.R_grid = {4.0, 8.0};
  cfg.threads = 4;
  const auto family = random_measure_family(1, 3, 2.0, 7);
  const auto r = equivalence_experiment(cfg, family);
  CHECK(r.pass);
  CHECK(r.metric("homogeneity_M").value < 1e-4);
}

TEST_CASE("remainder decays for the Dirac mass") {
  const DiscreteMeasure mu{1, {{{0.0}, 1.0}}};
  const auto r = remainder_experiment(mu, RemainderConfig{});
  CHECK(r.pass);
  CHECK(r.verdict == "within-bound");
}

TEST_CASE("harmonicity at the right angle is exact and second order elsewhere") {
  HarmonicityConfig cfg;
  auto r = harmonicity_experiment(cfg);
  CHECK(r.verdict == "exact");
  CHECK(r.pass);
  cfg.alpha1 = 3 * kPi / 4;
  r = harmonicity_experiment(cfg);
  CHECK(r.verdict == "second-order");
  CHECK(r.pass);
  cfg.target = HarmonicTarget::MartinKernel;
  r = harmonicity_experiment(cfg);
  CHECK(r.pass);
}

TEST_CASE("heat lifting obeys the maximum principle and the identity") {
  HeatConfig cfg;
  cfg.family_size = 3;
  const auto r = heat_lifting(cfg);
  CHECK(r.pass);
  CHECK(r.metric("max_principle_overshoot").value <= 1e-12);
}

TEST_CASE("heat propagation is a semigroup") {
  const int n = 8;
  const double R = 1.0, h = R / n;
  std::vector<double> eta;
  for (int i = -n; i <= n; ++i) eta.push_back(std::max(0.0, 1.0 - std::abs(i * h)));
  const HeatLift H(1, R, h, eta);
  const auto w0 = H.w(0.0);
  for (int i = 0; i < H.size(); ++i) CHECK(w0[i] == doctest::Approx(eta[i + 1]).epsilon(1e-10));
  const auto w1 = H.w(0.1);
  for (double v : w1) CHECK(v >= -1e-12);
  double a = 0.0, b = 0.0;
  for (int i = 0; i < H.size(); ++i) {
    a += w0[i];
    b += w1[i];
  }
  CHECK(b < a);
}

TEST_CASE("CSV rows") {
  ExperimentReport r;
  r.name = "x";
  r.parameters = {{"q", "2"}};
  r.metrics = {{"m", 1.5, 1.0, 2.0, true}, {"info", 3.0}};
  r.runtime = 1.25;
  const std::string csv = to_csv({r});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  CHECK(csv.find("runtime_s") == std::string::npos);
  CHECK(to_csv({r}, true).find("runtime_s") != std::string::npos);
  CHECK(r.parameter_string() == "q=2");
  CHECK(r.find("nope") == nullptr);
}
