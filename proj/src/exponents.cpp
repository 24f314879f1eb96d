#include "dihedral/exponents.hpp"

#include <cmath>
#include <limits>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

double safe_sqrt(double disc) {
  if (disc < 0.0 && disc > -1e-14) return 0.0;
  return std::sqrt(disc);
}

}  // namespace

double conjugate(double q) {
  if (!(q > 1.0)) domain_error("q must be > 1", "q");
  return q / (q - 1.0);
}

double kappa_from_gamma(int k, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) domain_error("gamma must be > 0", "gamma");
  if (k < 2) throw ValidationError(ErrorKind::Range, "kappa_from_gamma needs k >= 2", "k");
  const double b = k - 2.0;
  return 0.5 * (-b + safe_sqrt(b * b + 4.0 * gamma));
}

std::pair<double, double> kappa_roots(int N, double lambda_A) {
  if (!(lambda_A > 0.0) || !std::isfinite(lambda_A)) domain_error("lambda_A must be > 0", "lambda_A");
  if (N < 2) throw ValidationError(ErrorKind::Range, "N must be >= 2", "N");
  const double b = N - 2.0;
  const double r = safe_sqrt(b * b + 4.0 * lambda_A);
  const double plus = 0.5 * (-b + r);
  // product form keeps kappa_minus accurate when kappa_plus is small
  const double minus = -lambda_A / plus;
  return {plus, minus};
}

double cone_q_c(int N, double lambda_A) {
  const double r = safe_sqrt((N - 2.0) * (N - 2.0) + 4.0 * lambda_A);
  return (N + 2.0 + r) / (N - 2.0 + r);
}

ExponentReport critical_exponents(int N, int k, double gamma) {
  if (N < 2) throw ValidationError(ErrorKind::Range, "N must be >= 2", "N");
  if (k < 1 || k > N) throw ValidationError(ErrorKind::Range, "k must satisfy 1 <= k <= N", "k");
  ExponentReport rep;
  rep.N = N;
  rep.k = k;
  if (k == 1) {
    rep.gamma = 0.0;
    rep.kappa_plus = 1.0;
    rep.lambda_A = N - 1.0;
    rep.kappa_minus = 1.0 - N;
    rep.q_c = (N + 1.0) / (N - 1.0);
    rep.q_c_star = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.gamma = gamma;
  rep.kappa_plus = kappa_from_gamma(k, gamma);
  rep.lambda_A = gamma + (N - k) * rep.kappa_plus;
  rep.kappa_minus = 2.0 - N - rep.kappa_plus;
  rep.q_c = (rep.kappa_plus + N) / (rep.kappa_plus + N - 2.0);
  if (k == N)
    rep.q_c_star = rep.q_c;
  else
    rep.q_c_star = 1.0 + 2.0 / (rep.kappa_plus + k - 2.0);
  return rep;
}

double capacity_index_s(int k, double kappa_plus, double q) {
  if (!(q > 1.0)) domain_error("q must be > 1", "q");
  return 2.0 - (k + kappa_plus) * (q - 1.0) / q;
}

double ExponentReport::s(double q) const { return capacity_index_s(k, kappa_plus, q); }

double ExponentReport::beta(double q) const { return (q + 1.0) * kappa_plus + k - 1.0; }

double absorption_coefficient(int N, double q) {
  if (!(q > 1.0)) domain_error("q must be > 1", "q");
  return (2.0 / (q - 1.0)) * (2.0 * q / (q - 1.0) - N);
}

bool identity_check(int N, double lambda_A) {
  const auto [kp, km] = kappa_roots(N, lambda_A);
  (void)kp;
  const double q_c = 1.0 - 2.0 / km;
  const double a = absorption_coefficient(N, q_c);
  return std::abs(a - lambda_A) <= 1e-10 * lambda_A;
}

}  // namespace dihedral
