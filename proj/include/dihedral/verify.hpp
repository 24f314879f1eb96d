#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dihedral/core.hpp"
#include "dihedral/exponents.hpp"
#include "dihedral/kernels.hpp"

namespace dihedral {

struct Metric {
  std::string name;
  double value = 0.0;
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  /// Unset for informational metrics.
  std::optional<bool> pass;
};

struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<Metric> metrics;
  std::string verdict;
  bool pass = false;
  double runtime = 0.0;
  std::vector<std::string> notes;
  std::map<std::string, std::vector<double>> raw;

  const Metric& metric(const std::string& name) const;
  const Metric* find(const std::string& name) const;
  std::string parameter_string() const;
};

inline constexpr const char* kCsvHeader = "experiment,parameters,metric,value,ci_low,ci_high,pass";
std::string to_csv(const std::vector<ExperimentReport>& reports, bool include_runtime = false);

// ---------------------------------------------------------------------------

struct DichotomyConfig {
  int N = 3;
  int k = 2;
  double gamma = 4.0;
  double q = 2.0;
  /// Geometric, decreasing; empty means 1e-2 ... 1e-8.
  std::vector<double> eps_grid;
  double slope_tol = 0.05;
};

/// Admissibility integral of delta_0 with inner radial cutoff eps.
ExperimentReport dichotomy_experiment(const DichotomyConfig& cfg);

struct EquivalenceConfig {
  int N = 3;
  int k = 2;
  double gamma = 4.0;
  double q = 1.8;
  double R = 8.0;
  std::vector<double> R_grid{4.0, 8.0, 16.0};
  int family_size = 20;
  std::uint64_t seed = 42;
  double epsilon = 1e-3;
  double spread_bound = 1e3;
  double homogeneity_tol = 1e-4;
  double growth_slack = 0.10;
  int threads = 1;
};

/// Random positive atomic measures on R^m: 1..10 atoms uniform in B_{radius},
/// weights uniform in (0, 1].
std::vector<DiscreteMeasure> random_measure_family(int m, int count, double radius, std::uint64_t seed);

ExperimentReport equivalence_experiment(const EquivalenceConfig& cfg);
ExperimentReport equivalence_experiment(const EquivalenceConfig& cfg, const std::vector<DiscreteMeasure>& family);

struct RemainderConfig {
  KernelParams params{3.0, 1, 2.0, 0.0, 0.5, 2, 0.0};
  std::vector<double> R_grid{2.0, 4.0, 8.0, 16.0};
  double slack = 0.1;
};

ExperimentReport remainder_experiment(const DiscreteMeasure& mu, const RemainderConfig& cfg);

enum class HarmonicTarget { VA, MartinKernel };

struct HarmonicityConfig {
  int N = 3;
  int k = 2;
  double alpha1 = kPi / 2;
  HarmonicTarget target = HarmonicTarget::VA;
  std::vector<double> h_grid{0.1, 0.05, 0.025, 0.0125};
  double exact_tol = 1e-10;
  double order_low = 1.8;
  double order_high = 2.2;
};

ExperimentReport harmonicity_experiment(const HarmonicityConfig& cfg);

struct HeatConfig {
  int k = 2;
  int m = 1;
  double R = 4.0;
  double gamma = 4.0;
  double q = 1.8;
  /// Grid steps as fractions of R; the identity check halves twice.
  std::vector<int> divisions{32, 64, 128};
  int family_size = 8;
  std::uint64_t seed = 42;
  double overshoot_tol = 1e-12;
  double order_target = 2.0;
  double order_slack = 0.3;
  double ratio_spread_bound = 100.0;
};

/// Dirichlet heat flow on B_R^m and its lifting H(x', x'') = w(|x'|^2, x'').
class HeatLift {
 public:
  /// eta sampled on the uniform grid with step h; nodes outside B_R are dropped.
  HeatLift(int m, double R, double h, const std::vector<double>& eta);

  int m() const { return m_; }
  double h() const { return h_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<std::vector<double>>& nodes() const { return nodes_; }
  /// Node index of lattice point (i, j), or -1 outside the ball.
  int index(int i, int j = 0) const;
  int half_width() const { return n_; }

  /// L^p w(t) at every node, p = 0, 1, 2.
  std::vector<double> power(double t, int p) const;
  std::vector<double> w(double t) const { return power(t, 0); }

 private:
  int m_;
  double R_, h_;
  int n_;
  std::vector<std::vector<double>> nodes_;
  std::vector<int> lattice_;
  std::vector<double> lambda_;
  std::vector<double> basis_;  // column-major, size x size
  std::vector<double> coef_;
};

ExperimentReport heat_lifting(const HeatConfig& cfg);

}  // namespace dihedral
