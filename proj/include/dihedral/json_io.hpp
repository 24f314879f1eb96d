#pragma once

#include <json.hpp>
#include <string>

#include "dihedral/besov.hpp"
#include "dihedral/capacity.hpp"
#include "dihedral/classify.hpp"
#include "dihedral/core.hpp"
#include "dihedral/exponents.hpp"
#include "dihedral/verify.hpp"

namespace dihedral {

using Json = nlohmann::ordered_json;

/// Serializes with every float printed at 17 significant digits and
/// non-finite numbers as null.
std::string dump(const Json& j, int indent = 2);

Json parse_json(const std::string& text, const std::string& what = "input");
Json read_json_file(const std::string& path);
/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

WedgeSpec wedge_from_json(const Json& j);
PolyhedronSpec polyhedron_from_json(const Json& j);
DiscreteMeasure measure_from_json(const Json& j);
/// {"measures":[{"stratum":id,"m":..,"atoms":[..]}, ..]}
StratumMeasures stratum_measures_from_json(const Json& j);
CompactSetDescription set_from_json(const Json& j);

Json to_json(const WedgeSpec& w);
Json to_json(const DiscreteMeasure& mu);
Json to_json(const ExponentReport& r);
Json to_json(const Verdict& v);
Json to_json(const MeasureDecision& d);
Json to_json(const RemovabilityDecision& d);
Json to_json(const CapacityResult& r);
Json to_json(const NormProxyResult& r);
Json to_json(const ExperimentReport& r, bool include_runtime = false);

}  // namespace dihedral
