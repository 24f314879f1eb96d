#pragma once

#include <span>
#include <string>
#include <vector>

#include "dihedral/core.hpp"
#include "dihedral/exponents.hpp"

namespace dihedral {

using PointSet = std::vector<std::vector<double>>;

enum class CapacityVerdict { Positive, Vanishing, Inconclusive };
const char* to_string(CapacityVerdict v);

struct RefinementStep {
  double resolution = 0.0;  // finest cell size, or cutoff for rho-capacity
  double value = 0.0;
  double gap = 0.0;
};

struct CapacityResult {
  double value = 0.0;
  double resolution = 0.0;
  std::vector<RefinementStep> history;
  CapacityVerdict verdict = CapacityVerdict::Inconclusive;
};

struct VerdictRule {
  double vanish_threshold = 1e-2;
  double vanish_ratio = 1.5;
  double stable_change = 0.1;
};

CapacityVerdict judge(const std::vector<RefinementStep>& history, const VerdictRule& rule = {});

/// G_alpha(x) in R^l from the subordination integral.
double bessel_kernel(std::span<const double> x, double alpha);

/// G_alpha at distance r in R^l from 2c (2 pi r)^nu K_nu(r), nu = (alpha - l) / 2.
double bessel_kernel_radial(double r, double alpha, int l);

/// Source grid of cells (intervals or squares) refined toward the points.
struct CapacityGrid {
  int dim = 1;
  std::vector<std::vector<double>> centers;
  std::vector<double> sizes;
  double h_min = 0.0;

  std::size_t size() const { return sizes.size(); }
};

/// Background box = bounding box of the points widened by `margin`; cells
/// are split while larger than h_min and closer to a point than their size.
CapacityGrid build_capacity_grid(const PointSet& points, int dim, double h_min, double margin = 12.0,
                                 double base = 0.25);

struct SolveResult {
  double value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  std::vector<double> g;
};

/// min sum_j |cell_j| g_j^p  s.t. (G_alpha * g)(x) >= 1 on K, g >= 0, on a
/// fixed grid.
SolveResult bessel_capacity_on_grid(const PointSet& K, double alpha, double p, const CapacityGrid& grid,
                                    double gap_tol = 1e-6);

/// Refinement at resolutions res - 2, res - 1, res with h_min = 1e-4^level.
CapacityResult bessel_capacity(const PointSet& K, int dim, double alpha, double p, int resolution = 3);

/// sup mu(K)^q / J(mu) over atoms on K, history over the inner cutoffs.
CapacityResult rho_capacity(const PointSet& K, const ExponentReport& rep, double q, double R,
                            const std::vector<double>& cutoffs = {1e-2, 1e-4, 1e-6});

/// 1 / min over the simplex of the discretized J at one cutoff.
SolveResult rho_capacity_at(const PointSet& K, const ExponentReport& rep, double q, double R, double cutoff);

enum class NullTest { Null, Positive, NeedsNumeric };
const char* to_string(NullTest t);

NullTest capacity_null_test(const SetPiece& piece, double alpha, double p, int l);

}  // namespace dihedral
