#include "dihedral/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dihedral/error.hpp"

namespace dihedral {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Range: return "range";
    case ErrorKind::DegenerateOpening: return "degenerate-opening";
    case ErrorKind::PoleEndpoint: return "pole-endpoint";
    case ErrorKind::Reference: return "reference";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Bracket: return "bracket";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Resolution: return "resolution";
  }
  return "unknown";
}

const Stratum* PolyhedronSpec::find(const std::string& id) const {
  for (const auto& s : strata)
    if (s.id == id) return &s;
  return nullptr;
}

const Stratum& PolyhedronSpec::at(const std::string& id) const {
  if (const auto* s = find(id)) return *s;
  throw ValidationError(ErrorKind::Reference, "unknown stratum id '" + id + "'", "stratum");
}

double DiscreteMeasure::mass() const {
  double total = 0.0;
  for (const auto& a : atoms) total += a.w;
  return total;
}

bool DiscreteMeasure::empty() const {
  return std::none_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.w > 0.0; });
}

DiscreteMeasure DiscreteMeasure::scaled(double t) const {
  DiscreteMeasure out = *this;
  for (auto& a : out.atoms) a.w *= t;
  return out;
}

DiscreteMeasure DiscreteMeasure::translated(std::span<const double> shift) const {
  if (static_cast<int>(shift.size()) != m) domain_error("shift dimension does not match measure");
  DiscreteMeasure out = *this;
  for (auto& a : out.atoms)
    for (int i = 0; i < m; ++i) a.z[i] += shift[i];
  return out;
}

double DiscreteMeasure::support_radius() const {
  double r = 0.0;
  for (const auto& a : atoms) {
    if (a.w <= 0.0) continue;
    double s = 0.0;
    for (double c : a.z) s += c * c;
    r = std::max(r, std::sqrt(s));
  }
  return r;
}

double DiscreteMeasure::support_diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].w <= 0.0) continue;
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (atoms[j].w <= 0.0) continue;
      double s = 0.0;
      for (int c = 0; c < m; ++c) {
        const double diff = atoms[i].z[c] - atoms[j].z[c];
        s += diff * diff;
      }
      d = std::max(d, std::sqrt(s));
    }
  }
  return d;
}

std::vector<double> spherical_to_cartesian(double r, std::span<const double> sigma) {
  if (!(r >= 0.0) || !std::isfinite(r)) domain_error("radius must be finite and >= 0", "r");
  const std::size_t n_angles = sigma.size();
  if (n_angles < 1) domain_error("need at least one angle (N >= 2)", "sigma");
  if (sigma[0] < 0.0 || sigma[0] > 2.0 * kPi) domain_error("theta_1 outside [0, 2pi]", "sigma");
  for (std::size_t l = 1; l < n_angles; ++l)
    if (sigma[l] < 0.0 || sigma[l] > kPi) domain_error("theta_l outside [0, pi] for l >= 2", "sigma");

  const std::size_t N = n_angles + 1;
  std::vector<double> x(N);
  // prefix[l] = r * sin(theta_{N-1}) ... sin(theta_{l+1}) in 1-based angle labels
  double prefix = r;
  for (std::size_t l = n_angles; l >= 2; --l) {
    // x_{l+1} (1-based) = prefix * cos(theta_l)
    x[l] = prefix * std::cos(sigma[l - 1]);
    prefix *= std::sin(sigma[l - 1]);
  }
  x[0] = prefix * std::sin(sigma[0]);
  x[1] = prefix * std::cos(sigma[0]);
  return x;
}

SphericalPoint cartesian_to_spherical(std::span<const double> x) {
  const std::size_t N = x.size();
  if (N < 2) domain_error("need N >= 2", "x");
  SphericalPoint out;
  out.sigma.assign(N - 1, 0.0);
  // rho_l = |(x_1, ..., x_l)|
  std::vector<double> rho(N + 1, 0.0);
  for (std::size_t l = 1; l <= N; ++l) rho[l] = std::hypot(rho[l - 1], x[l - 1]);
  out.r = rho[N];
  for (std::size_t l = N - 1; l >= 2; --l) out.sigma[l - 1] = std::atan2(rho[l], x[l]);
  double t1 = std::atan2(x[0], x[1]);
  if (t1 < 0.0) t1 += 2.0 * kPi;
  out.sigma[0] = t1;
  return out;
}

WedgeSpec validate_wedge(const WedgeSpec& spec) {
  if (spec.N < 2) throw ValidationError(ErrorKind::Range, "N must be >= 2", "N");
  if (spec.k < 1 || spec.k > spec.N)
    throw ValidationError(ErrorKind::Range, "k must satisfy 1 <= k <= N", "k");
  if (spec.k == 1) {
    if (!spec.intervals.empty())
      throw ValidationError(ErrorKind::Validation, "k = 1 (half-space) takes no intervals", "intervals");
    return spec;
  }
  if (!std::isfinite(spec.alpha1) || spec.alpha1 <= 0.0)
    throw ValidationError(ErrorKind::Range, "alpha1 must be in (0, 2pi)", "alpha1");
  if (spec.alpha1 >= 2.0 * kPi)
    throw ValidationError(ErrorKind::DegenerateOpening,
                          "alpha1 >= 2pi is the degenerate (slit) opening", "alpha1");
  if (static_cast<int>(spec.intervals.size()) != spec.k - 2) {
    std::ostringstream os;
    os << "k = " << spec.k << " needs " << spec.k - 2 << " angle intervals, got "
       << spec.intervals.size();
    throw ValidationError(ErrorKind::Validation, os.str(), "intervals");
  }
  for (std::size_t j = 0; j < spec.intervals.size(); ++j) {
    const auto [a, b] = spec.intervals[j];
    const std::string field = "intervals[" + std::to_string(j) + "]";
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
      throw ValidationError(ErrorKind::Validation, "interval must satisfy a < b", field);
    if (a < 0.0 || b > kPi)
      throw ValidationError(ErrorKind::PoleEndpoint, "interval leaves [0, pi]", field);
    if ((a == 0.0 || b == kPi) && !spec.pole_endpoints)
      throw ValidationError(ErrorKind::PoleEndpoint,
                            "interval touches a pole; enable pole_endpoints for the bounded mode",
                            field);
    if (a == 0.0 && b == kPi)
      throw ValidationError(ErrorKind::PoleEndpoint,
                            "interval spanning both poles is not an angular box opening", field);
  }
  return spec;
}

bool in_spherical_domain(const WedgeSpec& spec, std::span<const double> sigma) {
  if (static_cast<int>(sigma.size()) != spec.N - 1) domain_error("sigma needs N-1 angles", "sigma");
  if (spec.k == 1) {
    // half-space x_1 >= 0
    const auto x = spherical_to_cartesian(1.0, sigma);
    return x[0] >= 0.0;
  }
  if (sigma[0] < 0.0 || sigma[0] > spec.alpha1) return false;
  for (int j = 2; j <= spec.k - 1; ++j) {
    const auto [a, b] = spec.intervals[j - 2];
    if (sigma[j - 1] < a || sigma[j - 1] > b) return false;
  }
  for (int l = std::max(spec.k, 2); l <= spec.N - 1; ++l)
    if (sigma[l - 1] < 0.0 || sigma[l - 1] > kPi) return false;
  return true;
}

DiscreteMeasure validate_measure(const DiscreteMeasure& mu) {
  if (mu.m < 0) throw ValidationError(ErrorKind::Range, "measure dimension must be >= 0", "m");
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    const auto& a = mu.atoms[i];
    const std::string field = "atoms[" + std::to_string(i) + "]";
    if (static_cast<int>(a.z.size()) != mu.m)
      throw ValidationError(ErrorKind::Validation, "atom position has wrong dimension", field + ".z");
    if (!std::isfinite(a.w) || a.w < 0.0)
      throw ValidationError(ErrorKind::Validation, "atom weight must be finite and >= 0", field + ".w");
    for (double c : a.z)
      if (!std::isfinite(c))
        throw ValidationError(ErrorKind::Validation, "atom position must be finite", field + ".z");
  }
  return mu;
}

PolyhedronSpec validate_polyhedron(const PolyhedronSpec& poly) {
  if (poly.N < 2) throw ValidationError(ErrorKind::Range, "N must be >= 2", "N");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < poly.strata.size(); ++i) {
    const auto& s = poly.strata[i];
    const std::string field = "strata[" + std::to_string(i) + "]";
    if (!seen.insert(s.id).second)
      throw ValidationError(ErrorKind::Validation, "duplicate stratum id '" + s.id + "'", field + ".id");
    if (s.k < 1 || s.k > poly.N)
      throw ValidationError(ErrorKind::Range, "stratum codimension outside 1..N", field + ".k");
    if (s.k == 1) {
      if (!std::holds_alternative<std::monostate>(s.opening))
        throw ValidationError(ErrorKind::Validation, "faces (k = 1) carry no opening", field + ".opening");
      continue;
    }
    if (std::holds_alternative<std::monostate>(s.opening))
      throw ValidationError(ErrorKind::Validation, "strata with k >= 2 need an opening", field + ".opening");
    if (const auto* w = std::get_if<WedgeSpec>(&s.opening)) {
      if (w->N != poly.N || w->k != s.k)
        throw ValidationError(ErrorKind::Validation, "opening (N, k) inconsistent with stratum",
                              field + ".opening");
      validate_wedge(*w);
    } else {
      const double g = std::get<GammaOpening>(s.opening).gamma;
      if (!std::isfinite(g) || g <= 0.0)
        throw ValidationError(ErrorKind::Domain, "gamma must be > 0", field + ".opening.gamma");
    }
  }
  return poly;
}

CompactSetDescription validate_set(const PolyhedronSpec& poly, const CompactSetDescription& set) {
  for (std::size_t i = 0; i < set.pieces.size(); ++i) {
    const auto& p = set.pieces[i];
    const std::string field = "pieces[" + std::to_string(i) + "]";
    const Stratum& s = poly.at(p.stratum);
    const int m = poly.edge_dim(s);
    auto check_point = [&](const std::vector<double>& z, const std::string& f) {
      if (static_cast<int>(z.size()) != m)
        throw ValidationError(ErrorKind::Validation, "point dimension must equal N - k", f);
      for (double c : z)
        if (!std::isfinite(c)) throw ValidationError(ErrorKind::Validation, "non-finite coordinate", f);
    };
    switch (p.kind) {
      case PieceKind::Point: check_point(p.center, field + ".z"); break;
      case PieceKind::Ball:
        check_point(p.center, field + ".center");
        if (!(p.radius > 0.0))
          throw ValidationError(ErrorKind::Validation, "ball radius must be > 0", field + ".radius");
        if (p.intrinsic_dim < 1 || p.intrinsic_dim > m)
          throw ValidationError(ErrorKind::Validation, "ball intrinsic dimension must be in 1..N-k",
                                field + ".dim");
        break;
      case PieceKind::Grid:
        for (std::size_t j = 0; j < p.points.size(); ++j)
          check_point(p.points[j], field + ".points[" + std::to_string(j) + "]");
        break;
    }
  }
  return set;
}

StratumMeasures decompose_measure(const PolyhedronSpec& poly, const StratumMeasures& mu) {
  StratumMeasures out;
  for (const auto& s : poly.strata) out[s.id] = DiscreteMeasure{poly.edge_dim(s), {}};
  for (const auto& [id, measure] : mu) {
    const Stratum& s = poly.at(id);
    validate_measure(measure);
    if (measure.m != poly.edge_dim(s))
      throw ValidationError(ErrorKind::Validation,
                            "measure on '" + id + "' must live in R^{N-k}", "m");
    auto& target = out[id];
    for (const auto& a : measure.atoms)
      if (a.w > 0.0) target.atoms.push_back(a);
  }
  return out;
}

double total_mass(const StratumMeasures& family) {
  double total = 0.0;
  for (const auto& [id, mu] : family) total += mu.mass();
  return total;
}

}  // namespace dihedral
