#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dihedral/capacity.hpp"
#include "dihedral/core.hpp"
#include "dihedral/exponents.hpp"

namespace dihedral {

enum class Regime { Subcritical, CapacityRegime, RemovableStratum, VertexSupercritical };
const char* to_string(Regime r);

struct Verdict {
  std::string stratum;
  Regime regime = Regime::Subcritical;
  double q_c = 0.0;
  double q_c_star = 0.0;
  std::optional<double> s;
  std::string reason;
  std::optional<std::string> warning;
};

/// Exponents of a stratum in R^N: faces use the half-space values, a
/// supplied gamma is used as is, a wedge box goes through the SL chain.
ExponentReport stratum_exponents(int N, const Stratum& stratum, double tol = 1e-8);
/// Exponents of every stratum; identical openings are solved once.
std::map<std::string, ExponentReport> polyhedron_exponents(const PolyhedronSpec& poly, double tol = 1e-8);

Verdict stratum_verdict(const ExponentReport& rep, const std::string& id, double q);
Verdict stratum_verdict(int N, const Stratum& stratum, double q);

/// Capacity evidence for one piece of a stratum.
struct Evidence {
  SetPiece piece;
  NullTest state = NullTest::NeedsNumeric;
};
using CapacityEvidence = std::vector<Evidence>;

enum class Decision { Accept, Reject, NeedsNumeric };
const char* to_string(Decision d);

struct StratumDecision {
  std::string stratum;
  Decision decision = Decision::Accept;
  Verdict verdict;
  std::string reason;
};

struct MeasureDecision {
  Decision decision = Decision::Accept;
  std::vector<StratumDecision> strata;
};

/// Good-measure test. Atoms not covered by evidence are decided with the
/// analytic point test, which is exact for singletons.
MeasureDecision good_measure_check(const PolyhedronSpec& poly, const StratumMeasures& mu, double q,
                                   const CapacityEvidence& evidence = {});

struct PieceDecision {
  std::size_t index = 0;
  std::string stratum;
  bool removable = false;
  NullTest capacity = NullTest::NeedsNumeric;
  Verdict verdict;
  std::string reason;
};

struct RemovabilityDecision {
  /// Accept = removable, Reject = not removable.
  Decision decision = Decision::Accept;
  std::vector<PieceDecision> pieces;
};

RemovabilityDecision removable_check(const PolyhedronSpec& poly, const CompactSetDescription& E, double q,
                                     const CapacityEvidence& evidence = {});

/// Evidence for a piece: analytic where decidable (a finite grid of null
/// points is null), bessel capacity refinements otherwise.
NullTest numeric_evidence(const SetPiece& piece, const ExponentReport& rep, double q, int resolution = 3);

}  // namespace dihedral
