#pragma once

#include <utility>

namespace dihedral {

/// Critical quantities of one stratum. For faces (k = 1) kappa_plus = 1,
/// gamma = 0 and q_c_star is +infinity.
struct ExponentReport {
  int N = 3;
  int k = 2;
  double gamma = 0.0;
  double lambda_A = 0.0;
  double kappa_plus = 0.0;
  double kappa_minus = 0.0;
  double q_c = 0.0;
  double q_c_star = 0.0;

  /// s(q) = 2 - (k + kappa_plus) / q'.
  double s(double q) const;
  /// (q + 1) kappa_plus + k - 1.
  double beta(double q) const;
  /// N - 2 + 2 kappa_plus, the order of the Martin kernel.
  double nu() const { return N - 2 + 2 * kappa_plus; }
  int m() const { return N - k; }
};

double kappa_from_gamma(int k, double gamma);
std::pair<double, double> kappa_roots(int N, double lambda_A);
ExponentReport critical_exponents(int N, int k, double gamma);
double capacity_index_s(int k, double kappa_plus, double q);
double absorption_coefficient(int N, double q);
/// a_{N, q_c} == lambda_A to 1e-10 relative, q_c taken from kappa_roots.
bool identity_check(int N, double lambda_A);
/// Direct cone formula (N + 2 + r) / (N - 2 + r), r = sqrt((N-2)^2 + 4 lambda_A).
double cone_q_c(int N, double lambda_A);
double conjugate(double q);

}  // namespace dihedral
