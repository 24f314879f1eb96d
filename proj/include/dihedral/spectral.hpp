#pragma once

#include <span>
#include <vector>

#include "dihedral/core.hpp"

namespace dihedral {

enum class EndpointKind { Dirichlet, Bounded };

/// (sin t)^{-d} (sin^d f')' - mu f / sin^2 t + gamma f = 0 on (a, b).
/// Bounded is only meaningful at a pole (a = 0 or b = pi) where the equation
/// is singular.
struct SLProblem {
  double a = 0.0;
  double b = kPi;
  int d = 0;
  double mu = 0.0;
  EndpointKind left = EndpointKind::Dirichlet;
  EndpointKind right = EndpointKind::Dirichlet;
};

struct EigenResult {
  double gamma = 0.0;
  double a = 0.0;
  double b = 0.0;
  double h = 0.0;
  double error = 0.0;
  std::vector<double> theta;
  std::vector<double> f;
  std::vector<double> df;

  /// Cubic Hermite interpolant of the normalized eigenfunction; 0 outside [a, b].
  double operator()(double t) const;
};

SLProblem validate_problem(const SLProblem& p);

/// First eigenvalue and eigenfunction: shooting with RK4 from both ends,
/// bisection on gamma, grid doubling until the Richardson error is <= tol * gamma.
EigenResult sl_eigen_1d(const SLProblem& p, double tol = 1e-8);

/// Shooting eigenvalue at a fixed resolution of n base steps.
double sl_eigen_shoot(const SLProblem& p, int n);

/// Second-order finite-volume estimate on n cells (used for bracketing).
double sl_eigen_fd(const SLProblem& p, int n);

/// Eigenfunction of the opening A on S^{k-1}:
/// sin(pi theta_1 / alpha1) * prod_j f_j(theta_j), maximum 1.
struct OpeningMode {
  WedgeSpec spec;
  double gamma = 0.0;
  std::vector<EigenResult> stages;  // stage j = 2..k-1 at index j - 2

  /// theta holds (theta_1, ..., theta_{k-1}); points outside A give 0.
  double omega_prime(std::span<const double> theta) const;
  /// omega'(x' / |x'|) for x' in R^k \ {0}; k = 1 means the half-line x' > 0.
  double omega_prime_at(std::span<const double> xprime) const;
};

OpeningMode opening_mode(const WedgeSpec& spec, double tol = 1e-8);
double gamma_first_eigenvalue(const WedgeSpec& spec, double tol = 1e-8);

/// First eigenfunction of S_A on S^{N-1}:
/// (sin theta_{N-1} ... sin theta_k)^{kappa_plus} omega'(theta_1..theta_{k-1}).
double omega_SA(const OpeningMode& mode, double kappa_plus, std::span<const double> sigma);

}  // namespace dihedral
