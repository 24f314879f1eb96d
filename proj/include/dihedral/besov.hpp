#pragma once

#include <vector>

#include "dihedral/core.hpp"
#include "dihedral/fit.hpp"
#include "dihedral/quadrature.hpp"

namespace dihedral {

struct NormProxyResult {
  double value = 0.0;
  double epsilon = 0.0;
  bool divergent = false;
  /// Fit of log I_eps against log eps over eps, eps/2, eps/4, eps/8.
  LinearFit fit;
  std::vector<double> eps_grid;
  std::vector<double> values;
};

/// Half-space Poisson normalization Gamma(n/2) / pi^{n/2}.
double gamma_n(int n);

/// I_eps(mu) = gamma_n^q int_{y_1 > eps} int_{R^{n-1}} K_n[mu]^q e^{-y_1} y_1^{sq - 1} dy.
double besov_proxy_value(const DiscreteMeasure& mu, double s, double q, double eps,
                         const QuadratureSpec& spec = {1e-7});

/// Proxy at eps plus the four-point cutoff scan; divergent when the fitted
/// slope is < -0.1 with R^2 > 0.99.
NormProxyResult besov_neg_proxy(const DiscreteMeasure& mu, double s, double q, double eps,
                                const QuadratureSpec& spec = {1e-7});

/// Samples on a uniform grid in R^l (l = 1 or 2), row-major with x_1 fastest.
/// Values outside the grid are 0.
struct SampledFunction {
  int dim = 1;
  double h = 0.01;
  std::vector<int> shape;
  std::vector<double> origin;
  std::vector<double> values;

  double at(int i, int j = 0) const;
};

struct PosNormResult {
  double value = 0.0;
  double coarse_value = 0.0;
  double delta = 0.0;
};

/// Grid value of the W^{s,p} = B^{s,p} norm (s in (0, 2)) without the
/// resolution check.
double besov_pos_norm_raw(const SampledFunction& f, double s, double p);

/// Norm with a 2x coarser comparison; relative delta >= 5% throws a
/// resolution error.
PosNormResult besov_pos_norm_checked(const SampledFunction& f, double s, double p);
double besov_pos_norm(const SampledFunction& f, double s, double p);

SampledFunction coarsen(const SampledFunction& f);

}  // namespace dihedral
