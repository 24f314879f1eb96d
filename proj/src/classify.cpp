#include "dihedral/classify.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include "dihedral/error.hpp"
#include "dihedral/spectral.hpp"

namespace dihedral {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::CapacityRegime: return "capacity-regime";
    case Regime::RemovableStratum: return "removable-stratum";
    case Regime::VertexSupercritical: return "vertex-supercritical";
  }
  return "subcritical";
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::Accept: return "accept";
    case Decision::Reject: return "reject";
    case Decision::NeedsNumeric: return "needs-numeric";
  }
  return "needs-numeric";
}

namespace {

std::string opening_key(int N, const Stratum& s) {
  std::ostringstream os;
  os.precision(17);
  os << N << '/' << s.k << '/';
  if (const auto* w = std::get_if<WedgeSpec>(&s.opening)) {
    os << "w" << w->alpha1 << '/' << w->pole_endpoints;
    for (auto [a, b] : w->intervals) os << '/' << a << ',' << b;
  } else if (const auto* g = std::get_if<GammaOpening>(&s.opening)) {
    os << "g" << g->gamma;
  } else {
    os << "face";
  }
  return os.str();
}

bool at_critical(double q, double qc) { return std::isfinite(qc) && std::abs(q - qc) <= 1e-12 * qc; }

bool same_point(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-12 * (1.0 + std::abs(a[i]))) return false;
  return true;
}

bool covers(const SetPiece& piece, const std::vector<double>& z) {
  switch (piece.kind) {
    case PieceKind::Point: return same_point(piece.center, z);
    case PieceKind::Ball: {
      if (piece.center.size() != z.size()) return false;
      double d2 = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) d2 += (z[i] - piece.center[i]) * (z[i] - piece.center[i]);
      // lower-dimensional balls lie along the first intrinsic_dim axes
      for (std::size_t i = piece.intrinsic_dim; i < z.size(); ++i)
        if (std::abs(z[i] - piece.center[i]) > 1e-12) return false;
      return std::sqrt(d2) <= piece.radius * (1 + 1e-12);
    }
    case PieceKind::Grid:
      for (const auto& p : piece.points)
        if (same_point(p, z)) return true;
      return false;
  }
  return false;
}

bool same_piece(const SetPiece& a, const SetPiece& b) {
  if (a.stratum != b.stratum || a.kind != b.kind) return false;
  if (a.kind == PieceKind::Grid) {
    if (a.points.size() != b.points.size()) return false;
    for (std::size_t i = 0; i < a.points.size(); ++i)
      if (!same_point(a.points[i], b.points[i])) return false;
    return true;
  }
  return same_point(a.center, b.center) && std::abs(a.radius - b.radius) <= 1e-12 &&
         a.intrinsic_dim == b.intrinsic_dim;
}

}  // namespace

ExponentReport stratum_exponents(int N, const Stratum& stratum, double tol) {
  if (stratum.k == 1) return critical_exponents(N, 1, 0.0);
  if (const auto* g = std::get_if<GammaOpening>(&stratum.opening)) return critical_exponents(N, stratum.k, g->gamma);
  if (const auto* w = std::get_if<WedgeSpec>(&stratum.opening)) {
    static std::mutex lock;
    static std::map<std::pair<std::string, double>, double> solved;
    const auto key = std::make_pair(opening_key(N, stratum), tol);
    {
      std::lock_guard<std::mutex> guard(lock);
      if (auto it = solved.find(key); it != solved.end()) return critical_exponents(N, stratum.k, it->second);
    }
    WedgeSpec spec = *w;
    spec.N = N;
    spec.k = stratum.k;
    const double gamma = gamma_first_eigenvalue(spec, tol);
    std::lock_guard<std::mutex> guard(lock);
    solved.emplace(key, gamma);
    return critical_exponents(N, stratum.k, gamma);
  }
  throw ValidationError(ErrorKind::Validation, "stratum '" + stratum.id + "' with k >= 2 needs an opening", "opening");
}

std::map<std::string, ExponentReport> polyhedron_exponents(const PolyhedronSpec& poly, double tol) {
  std::map<std::string, ExponentReport> cache, out;
  for (const auto& s : poly.strata) {
    const std::string key = opening_key(poly.N, s);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, stratum_exponents(poly.N, s, tol)).first;
    out[s.id] = it->second;
  }
  return out;
}

Verdict stratum_verdict(const ExponentReport& rep, const std::string& id, double q) {
  if (!(q > 1.0)) domain_error("q must be > 1", "q");
  Verdict v;
  v.stratum = id;
  v.q_c = rep.q_c;
  v.q_c_star = rep.q_c_star;
  if (q < rep.q_c && !at_critical(q, rep.q_c)) {
    v.regime = Regime::Subcritical;
    v.reason = "q < q_c: every measure on the stratum is q-good";
    return v;
  }
  if (at_critical(q, rep.q_c))
    v.warning = "q = q_c: the equivalence needs supp mu of sufficiently small diameter";
  if (rep.k == rep.N) {
    v.regime = Regime::VertexSupercritical;
    v.reason = "q >= q_c at a vertex: mu(L) = 0 required";
    return v;
  }
  if (q >= rep.q_c_star || at_critical(q, rep.q_c_star)) {
    v.regime = Regime::RemovableStratum;
    v.reason = "q >= q_c*: mu(L) = 0 required";
    return v;
  }
  v.regime = Regime::CapacityRegime;
  v.s = rep.s(q);
  std::ostringstream os;
  os << "q_c <= q < q_c*: mu must not charge sets of zero C_{s,q'} capacity on R^" << rep.m();
  v.reason = os.str();
  return v;
}

Verdict stratum_verdict(int N, const Stratum& stratum, double q) {
  return stratum_verdict(stratum_exponents(N, stratum), stratum.id, q);
}

MeasureDecision good_measure_check(const PolyhedronSpec& poly, const StratumMeasures& mu, double q,
                                   const CapacityEvidence& evidence) {
  const StratumMeasures family = decompose_measure(poly, mu);
  const auto reps = polyhedron_exponents(poly);
  MeasureDecision out;
  for (const auto& stratum : poly.strata) {
    const auto& rep = reps.at(stratum.id);
    const DiscreteMeasure& m = family.at(stratum.id);
    StratumDecision d;
    d.stratum = stratum.id;
    d.verdict = stratum_verdict(rep, stratum.id, q);
    const bool charged = m.mass() > 0.0;
    switch (d.verdict.regime) {
      case Regime::Subcritical: d.reason = "subcritical: always good"; break;
      case Regime::RemovableStratum:
      case Regime::VertexSupercritical:
        if (charged) {
          d.decision = Decision::Reject;
          d.reason = "mu(L) = 0 required";
        } else {
          d.reason = "mu(L) = 0";
        }
        break;
      case Regime::CapacityRegime: {
        const double s = *d.verdict.s;
        const double pc = conjugate(q);
        d.reason = "no atom on a capacity-null set";
        for (const auto& atom : m.atoms) {
          if (!(atom.w > 0.0)) continue;
          NullTest state = NullTest::NeedsNumeric;
          bool found = false;
          for (const auto& e : evidence)
            if (e.piece.stratum == stratum.id && covers(e.piece, atom.z)) {
              found = true;
              state = e.state;
              if (state == NullTest::Null) break;
            }
          if (!found) {
            SetPiece p;
            p.stratum = stratum.id;
            p.kind = PieceKind::Point;
            p.center = atom.z;
            state = capacity_null_test(p, s, pc, rep.m());
          }
          if (state == NullTest::Null) {
            d.decision = Decision::Reject;
            d.reason = "mu charges a C_{s,q'}-null set";
            break;
          }
          if (state == NullTest::NeedsNumeric && d.decision == Decision::Accept) {
            d.decision = Decision::NeedsNumeric;
            d.reason = "capacity evidence inconclusive";
          }
        }
        break;
      }
    }
    if (d.decision == Decision::Reject)
      out.decision = Decision::Reject;
    else if (d.decision == Decision::NeedsNumeric && out.decision == Decision::Accept)
      out.decision = Decision::NeedsNumeric;
    out.strata.push_back(std::move(d));
  }
  return out;
}

RemovabilityDecision removable_check(const PolyhedronSpec& poly, const CompactSetDescription& E, double q,
                                     const CapacityEvidence& evidence) {
  const CompactSetDescription set = validate_set(poly, E);
  const auto reps = polyhedron_exponents(poly);
  RemovabilityDecision out;
  for (std::size_t i = 0; i < set.pieces.size(); ++i) {
    const SetPiece& piece = set.pieces[i];
    const auto& rep = reps.at(piece.stratum);
    PieceDecision d;
    d.index = i;
    d.stratum = piece.stratum;
    d.verdict = stratum_verdict(rep, piece.stratum, q);
    switch (d.verdict.regime) {
      case Regime::Subcritical:
        d.capacity = NullTest::Positive;
        d.reason = "q < q_c: nonempty sets are not removable";
        break;
      case Regime::RemovableStratum:
        d.removable = true;
        d.capacity = NullTest::Null;
        d.reason = "q >= q_c*: the stratum is removable";
        break;
      case Regime::VertexSupercritical:
        d.removable = true;
        d.capacity = NullTest::Null;
        d.reason = "k = N and q >= q_c";
        break;
      case Regime::CapacityRegime: {
        bool found = false;
        for (const auto& e : evidence)
          if (same_piece(e.piece, piece)) {
            found = true;
            d.capacity = e.state;
          }
        if (!found) d.capacity = capacity_null_test(piece, *d.verdict.s, conjugate(q), rep.m());
        d.removable = d.capacity == NullTest::Null;
        d.reason = std::string("capacity-regime: C_{s,q'} capacity ") + to_string(d.capacity);
        break;
      }
    }
    if (d.verdict.regime == Regime::CapacityRegime && d.capacity == NullTest::NeedsNumeric) {
      if (out.decision == Decision::Accept) out.decision = Decision::NeedsNumeric;
    } else if (!d.removable) {
      out.decision = Decision::Reject;
    }
    out.pieces.push_back(std::move(d));
  }
  return out;
}

NullTest numeric_evidence(const SetPiece& piece, const ExponentReport& rep, double q, int resolution) {
  const NullTest analytic = capacity_null_test(piece, rep.s(q), conjugate(q), rep.m());
  if (analytic != NullTest::NeedsNumeric) return analytic;
  // a finite union of null points is null by subadditivity
  if (piece.kind == PieceKind::Grid && rep.s(q) * conjugate(q) <= rep.m()) return NullTest::Null;
  if (rep.m() < 1 || rep.m() > 2) return NullTest::NeedsNumeric;
  const CapacityResult r = bessel_capacity(piece.points, rep.m(), rep.s(q), conjugate(q), resolution);
  if (r.verdict == CapacityVerdict::Vanishing) return NullTest::Null;
  if (r.verdict == CapacityVerdict::Positive) return NullTest::Positive;
  return NullTest::NeedsNumeric;
}

}  // namespace dihedral
