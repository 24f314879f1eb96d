#pragma once

#include <optional>
#include <span>

#include "dihedral/core.hpp"
#include "dihedral/exponents.hpp"
#include "dihedral/quadrature.hpp"
#include "dihedral/spectral.hpp"

namespace dihedral {

struct KernelParams {
  double nu = 3.0;
  int m = 1;
  double q = 2.0;
  double s = 0.5;
  double sigma = 0.5;
  int j = 1;
  double R = 8.0;
};

/// sum_i w_i tau^{nu - m} (tau^2 + |zeta - z_i|^2)^{-nu/2}
double k_nu_m(double tau, std::span<const double> zeta, const DiscreteMeasure& mu, double nu);

/// Martin kernel of the wedge with pole z on the edge, c_A = 1.
/// x = (x', x'') with x' the first k coordinates.
double martin_kernel(std::span<const double> x, std::span<const double> z, const ExponentReport& rep,
                     const OpeningMode& mode);
double poisson_potential(const DiscreteMeasure& mu, std::span<const double> x, const ExponentReport& rep,
                         const OpeningMode& mode);

/// F_{nu,m}[mu](tau) = int (sum_i w_i (tau^2 + |y - z_i|^2)^{-nu/2})^q dy over R^m,
/// or over the ball B_R when R is given.
double F_nu_m(double tau, const DiscreteMeasure& mu, double nu, double q, std::optional<double> R,
              const QuadratureSpec& spec = {});

/// tau^{nu q - m} F_{nu,m}[mu](tau), finite as tau -> 0 for atoms.
double F_scaled(double tau, const DiscreteMeasure& mu, double nu, double q, std::optional<double> R,
                const QuadratureSpec& spec = {});

/// Closed form of F for a unit atom over R^m.
double F_atom_exact(double tau, int m, double nu, double q);

/// int_eps^R F^R(tau) tau^{(s + nu - m) q - 1} dtau with eps = spec.epsilon.
double M_nu_s(const DiscreteMeasure& mu, double nu, double s, double q, double R,
              const QuadratureSpec& spec = {});

/// Residual of (s + nu - m) q - 1 = (q + 1) kappa_plus + k - 1 for the wedge
/// substitution; relative.
double exponent_identity_residual(const ExponentReport& rep, double q);

/// M_nu_s with nu = N - 2 + 2 kappa_plus, m = N - k, s = s(q). Throws when
/// the exponent identity fails.
double J_AR(const DiscreteMeasure& mu, const ExponentReport& rep, double R, double q,
            const QuadratureSpec& spec = {});

/// h_{sigma,j}(tau)
double h_sigma_j(double tau, double sigma, int j, double q);

/// int_eps^inf F_{nu,m}(tau) h_{sigma,j}(tau) dtau
double reduced_I(const DiscreteMeasure& mu, const KernelParams& p, const QuadratureSpec& spec = {});

/// The full functional over the upper half-space R^j_+ in polar form around
/// the tau axis; equals reduced_I for j = 1.
double I_m_j(const DiscreteMeasure& mu, const KernelParams& p, const QuadratureSpec& spec = {});

/// Delta(R) = |int_0^inf F h - int_0^R F^R h|, assembled from the two
/// nonnegative tails so that nothing cancels.
double remainder_delta(const DiscreteMeasure& mu, const KernelParams& p, const QuadratureSpec& spec = {});

/// Default truncation radius 8 (diam + 1).
double default_radius(const DiscreteMeasure& mu);

}  // namespace dihedral
