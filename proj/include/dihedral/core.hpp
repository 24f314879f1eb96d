#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dihedral {

inline constexpr double kPi = 3.14159265358979323846;

/// Geometric description of a k-wedge in R^N.
///
/// The opening is the angular box A = (0, alpha1) x prod_j (a_j, a'_j) on
/// S^{k-1}; interval j (j = 2..k-1) constrains the spherical angle theta_j,
/// alpha1 bounds the periodic angle theta_1. k = 1 is the half-space (no
/// opening data); k = N is a cone with vertex at the origin.
struct WedgeSpec {
  int N = 3;
  int k = 2;
  double alpha1 = kPi / 2;
  std::vector<std::pair<double, double>> intervals;
  /// Allows interval endpoints at the poles 0 and pi; the eigenfunction is
  /// then required to stay bounded there instead of vanishing.
  bool pole_endpoints = false;
};

/// Opening of a stratum: a wedge box, a supplied first eigenvalue of A, or
/// nothing (faces).
struct GammaOpening {
  double gamma = 0.0;
};
using Opening = std::variant<std::monostate, WedgeSpec, GammaOpening>;

struct Stratum {
  std::string id;
  int k = 1;
  Opening opening;
};

struct PolyhedronSpec {
  int N = 3;
  std::vector<Stratum> strata;

  const Stratum* find(const std::string& id) const;
  const Stratum& at(const std::string& id) const;
  /// Dimension of the stratum's edge space d_A, i.e. N - k.
  int edge_dim(const Stratum& s) const { return N - s.k; }
};

struct Atom {
  std::vector<double> z;
  double w = 0.0;
};

/// Finite nonnegative atomic measure on R^m.
struct DiscreteMeasure {
  int m = 1;
  std::vector<Atom> atoms;

  double mass() const;
  bool empty() const;
  DiscreteMeasure scaled(double t) const;
  DiscreteMeasure translated(std::span<const double> shift) const;
  /// Largest |z_i| over atoms with positive weight.
  double support_radius() const;
  double support_diameter() const;
};

enum class PieceKind { Point, Ball, Grid };

struct SetPiece {
  std::string stratum;
  PieceKind kind = PieceKind::Point;
  std::vector<double> center;                // point or ball center
  double radius = 0.0;                       // ball
  int intrinsic_dim = 0;                     // ball
  std::vector<std::vector<double>> points;   // grid
};

struct CompactSetDescription {
  std::vector<SetPiece> pieces;
};

// ---------------------------------------------------------------------------
// Coordinates

/// Spherical angles sigma = (theta_1, ..., theta_{N-1}) to Cartesian x in R^N.
/// x_1 = r sin(theta_{N-1}) ... sin(theta_1), x_2 = ... cos(theta_1),
/// x_N = r cos(theta_{N-1}).
std::vector<double> spherical_to_cartesian(double r, std::span<const double> sigma);

struct SphericalPoint {
  double r = 0.0;
  std::vector<double> sigma;
};

/// Inverse of spherical_to_cartesian; theta_1 is returned in [0, 2pi).
SphericalPoint cartesian_to_spherical(std::span<const double> x);

// ---------------------------------------------------------------------------
// Validation

WedgeSpec validate_wedge(const WedgeSpec& spec);
DiscreteMeasure validate_measure(const DiscreteMeasure& mu);
PolyhedronSpec validate_polyhedron(const PolyhedronSpec& poly);
CompactSetDescription validate_set(const PolyhedronSpec& poly, const CompactSetDescription& set);

/// True when sigma (N-1 angles) lies in the closure of S_A.
bool in_spherical_domain(const WedgeSpec& spec, std::span<const double> sigma);

// ---------------------------------------------------------------------------
// Measures across strata

using StratumMeasures = std::map<std::string, DiscreteMeasure>;

/// Splits a boundary measure into the per-stratum family mu_{k,j}: every
/// stratum of the polyhedron gets an entry (zero when nothing lives there),
/// positions stay in the stratum's intrinsic R^{N-k} coordinates.
StratumMeasures decompose_measure(const PolyhedronSpec& poly, const StratumMeasures& mu);

double total_mass(const StratumMeasures& family);

}  // namespace dihedral
