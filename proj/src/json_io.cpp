#include "dihedral/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dihedral/error.hpp"

namespace dihedral {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ValidationError(ErrorKind::Validation, field + ": " + what, field);
}

const Json& need(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double get_double(const Json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  return j.get<double>();
}

int get_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "expected an integer");
  return j.get<int>();
}

std::string get_string(const Json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_vector(const Json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_double(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

WedgeSpec wedge_at(const Json& j, const std::string& path) {
  WedgeSpec w;
  w.N = get_int(need(j, "N", path), join(path, "N"));
  w.k = get_int(need(j, "k", path), join(path, "k"));
  w.alpha1 = get_double(need(j, "alpha1", path), join(path, "alpha1"));
  if (auto it = j.find("intervals"); it != j.end()) {
    const std::string f = join(path, "intervals");
    if (!it->is_array()) bad(f, "expected an array of [a, b] pairs");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto v = get_vector((*it)[i], f + "[" + std::to_string(i) + "]");
      if (v.size() != 2) bad(f + "[" + std::to_string(i) + "]", "expected [a, b]");
      w.intervals.push_back({v[0], v[1]});
    }
  }
  if (auto it = j.find("pole_endpoints"); it != j.end()) {
    if (!it->is_boolean()) bad(join(path, "pole_endpoints"), "expected a boolean");
    w.pole_endpoints = it->get<bool>();
  }
  return w;
}

DiscreteMeasure measure_at(const Json& j, const std::string& path) {
  DiscreteMeasure mu;
  mu.m = get_int(need(j, "m", path), join(path, "m"));
  const Json& atoms = need(j, "atoms", path);
  const std::string f = join(path, "atoms");
  if (!atoms.is_array()) bad(f, "expected an array");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string fi = f + "[" + std::to_string(i) + "]";
    Atom a;
    a.z = get_vector(need(atoms[i], "z", fi), fi + ".z");
    a.w = get_double(need(atoms[i], "w", fi), fi + ".w");
    mu.atoms.push_back(std::move(a));
  }
  return mu;
}

void write_number(std::ostream& os, const Json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      os << "null";
      return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    os << s;
    return;
  }
  os << j.dump();
}

void write(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* sep = indent > 0 ? ": " : ":";
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << '{' << nl;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ',' << nl;
      first = false;
      os << pad << Json(it.key()).dump() << sep;
      write(os, it.value(), indent, depth + 1);
    }
    os << nl << close << '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (flat) {
      os << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << (indent > 0 ? ", " : ",");
        write(os, j[i], indent, depth + 1);
      }
      os << ']';
      return;
    }
    os << '[' << nl;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) os << ',' << nl;
      os << pad;
      write(os, j[i], indent, depth + 1);
    }
    os << nl << close << ']';
  } else if (j.is_number()) {
    write_number(os, j);
  } else {
    os << j.dump();
  }
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  return os.str();
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(ErrorKind::Validation, what + ": malformed JSON (" + e.what() + ")", what);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(ErrorKind::Configuration, "cannot open '" + path + "'", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError(ErrorKind::Configuration, "cannot write '" + tmp.string() + "'", path);
    out << content;
    out.flush();
    if (!out) throw ValidationError(ErrorKind::Configuration, "write failed for '" + tmp.string() + "'", path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ValidationError(ErrorKind::Configuration, "cannot rename into '" + path + "': " + ec.message(), path);
  }
}

WedgeSpec wedge_from_json(const Json& j) { return wedge_at(j, ""); }

PolyhedronSpec polyhedron_from_json(const Json& j) {
  PolyhedronSpec poly;
  if (auto it = j.find("N"); j.is_object() && it != j.end()) poly.N = get_int(*it, "N");
  const Json& strata = need(j, "strata", "");
  if (!strata.is_array()) bad("strata", "expected an array");
  int maxk = 0;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const std::string f = "strata[" + std::to_string(i) + "]";
    Stratum s;
    s.id = get_string(need(strata[i], "id", f), f + ".id");
    s.k = get_int(need(strata[i], "k", f), f + ".k");
    maxk = std::max(maxk, s.k);
    const Json& op = need(strata[i], "opening", f);
    if (op.is_null()) {
      s.opening = std::monostate{};
    } else if (op.is_object() && op.contains("gamma")) {
      s.opening = GammaOpening{get_double(op["gamma"], f + ".opening.gamma")};
    } else if (op.is_object()) {
      s.opening = wedge_at(op, f + ".opening");
    } else {
      bad(f + ".opening", "expected a wedge, {\"gamma\": ..} or null");
    }
    poly.strata.push_back(std::move(s));
  }
  if (!j.contains("N")) {
    // N from the wedge openings, else the largest stratum dimension
    int N = maxk;
    for (const auto& s : poly.strata)
      if (const auto* w = std::get_if<WedgeSpec>(&s.opening)) N = w->N;
    poly.N = N;
  }
  return poly;
}

DiscreteMeasure measure_from_json(const Json& j) { return measure_at(j, ""); }

StratumMeasures stratum_measures_from_json(const Json& j) {
  StratumMeasures out;
  const Json& list = need(j, "measures", "");
  if (!list.is_array()) bad("measures", "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string f = "measures[" + std::to_string(i) + "]";
    const std::string id = get_string(need(list[i], "stratum", f), f + ".stratum");
    DiscreteMeasure mu = measure_at(list[i], f);
    auto& slot = out[id];
    if (slot.atoms.empty()) slot.m = mu.m;
    if (slot.m != mu.m) bad(f + ".m", "conflicting dimension for stratum '" + id + "'");
    for (auto& a : mu.atoms) slot.atoms.push_back(std::move(a));
  }
  return out;
}

CompactSetDescription set_from_json(const Json& j) {
  CompactSetDescription set;
  const Json& pieces = need(j, "pieces", "");
  if (!pieces.is_array()) bad("pieces", "expected an array");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string f = "pieces[" + std::to_string(i) + "]";
    SetPiece p;
    p.stratum = get_string(need(pieces[i], "stratum", f), f + ".stratum");
    const std::string kind = get_string(need(pieces[i], "kind", f), f + ".kind");
    if (kind == "point") {
      p.kind = PieceKind::Point;
      p.center = pieces[i].contains("center") ? get_vector(pieces[i]["center"], f + ".center") : std::vector<double>{};
    } else if (kind == "ball") {
      p.kind = PieceKind::Ball;
      p.center = get_vector(need(pieces[i], "center", f), f + ".center");
      p.radius = get_double(need(pieces[i], "radius", f), f + ".radius");
      p.intrinsic_dim = pieces[i].contains("dim") ? get_int(pieces[i]["dim"], f + ".dim")
                                                  : static_cast<int>(p.center.size());
    } else if (kind == "grid") {
      p.kind = PieceKind::Grid;
      const Json& pts = need(pieces[i], "points", f);
      if (!pts.is_array()) bad(f + ".points", "expected an array");
      for (std::size_t k = 0; k < pts.size(); ++k)
        p.points.push_back(get_vector(pts[k], f + ".points[" + std::to_string(k) + "]"));
    } else {
      bad(f + ".kind", "expected \"point\", \"ball\" or \"grid\"");
    }
    set.pieces.push_back(std::move(p));
  }
  return set;
}

Json to_json(const WedgeSpec& w) {
  Json j;
  j["N"] = w.N;
  j["k"] = w.k;
  j["alpha1"] = w.alpha1;
  Json iv = Json::array();
  for (auto [a, b] : w.intervals) iv.push_back(Json::array({a, b}));
  j["intervals"] = iv;
  if (w.pole_endpoints) j["pole_endpoints"] = true;
  return j;
}

Json to_json(const DiscreteMeasure& mu) {
  Json j;
  j["m"] = mu.m;
  Json atoms = Json::array();
  for (const auto& a : mu.atoms) atoms.push_back(Json{{"z", a.z}, {"w", a.w}});
  j["atoms"] = atoms;
  return j;
}

Json to_json(const ExponentReport& r) {
  Json j;
  j["gamma"] = r.gamma;
  j["lambda_A"] = r.lambda_A;
  j["kappa_plus"] = r.kappa_plus;
  j["kappa_minus"] = r.kappa_minus;
  j["q_c"] = r.q_c;
  j["q_c_star"] = number_or_null(r.q_c_star);
  return j;
}

Json to_json(const Verdict& v) {
  Json j;
  j["stratum"] = v.stratum;
  j["regime"] = to_string(v.regime);
  j["q_c"] = v.q_c;
  j["q_c_star"] = number_or_null(v.q_c_star);
  j["s"] = optional_json(v.s);
  j["reason"] = v.reason;
  j["warning"] = optional_json(v.warning);
  return j;
}

Json to_json(const MeasureDecision& d) {
  Json j;
  j["decision"] = to_string(d.decision);
  Json strata = Json::array();
  for (const auto& s : d.strata)
    strata.push_back(Json{{"stratum", s.stratum},
                          {"decision", to_string(s.decision)},
                          {"reason", s.reason},
                          {"verdict", to_json(s.verdict)}});
  j["strata"] = strata;
  return j;
}

Json to_json(const RemovabilityDecision& d) {
  Json j;
  j["removable"] = d.decision == Decision::Accept   ? Json(true)
                   : d.decision == Decision::Reject ? Json(false)
                                                    : Json("needs-numeric");
  Json pieces = Json::array();
  for (const auto& p : d.pieces)
    pieces.push_back(Json{{"piece", p.index},
                          {"stratum", p.stratum},
                          {"removable", p.removable},
                          {"capacity", to_string(p.capacity)},
                          {"reason", p.reason},
                          {"verdict", to_json(p.verdict)}});
  j["pieces"] = pieces;
  return j;
}

Json to_json(const CapacityResult& r) {
  Json j;
  j["value"] = r.value;
  j["resolution"] = r.resolution;
  j["verdict"] = to_string(r.verdict);
  Json h = Json::array();
  for (const auto& s : r.history) h.push_back(Json{{"resolution", s.resolution}, {"value", s.value}, {"gap", s.gap}});
  j["history"] = h;
  return j;
}

Json to_json(const NormProxyResult& r) {
  Json j;
  j["value"] = number_or_null(r.value);
  j["epsilon"] = r.epsilon;
  j["divergent"] = r.divergent;
  j["slope"] = number_or_null(r.fit.slope);
  j["r2"] = number_or_null(r.fit.r2);
  j["eps_grid"] = r.eps_grid;
  Json vals = Json::array();
  for (double v : r.values) vals.push_back(number_or_null(v));
  j["values"] = vals;
  return j;
}

Json to_json(const ExperimentReport& r, bool include_runtime) {
  Json j;
  j["experiment"] = r.name;
  Json params;
  for (const auto& [k, v] : r.parameters) params[k] = v;
  j["parameters"] = params;
  j["verdict"] = r.verdict;
  j["pass"] = r.pass;
  Json metrics = Json::array();
  for (const auto& m : r.metrics) {
    Json mj{{"metric", m.name}, {"value", number_or_null(m.value)}};
    mj["ci_low"] = number_or_null(m.ci_low);
    mj["ci_high"] = number_or_null(m.ci_high);
    mj["pass"] = m.pass ? Json(*m.pass) : Json(nullptr);
    metrics.push_back(mj);
  }
  j["metrics"] = metrics;
  if (!r.notes.empty()) j["notes"] = r.notes;
  Json raw;
  for (const auto& [k, v] : r.raw) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(number_or_null(x));
    raw[k] = arr;
  }
  j["raw"] = raw;
  if (include_runtime) j["runtime_s"] = r.runtime;
  return j;
}

}  // namespace dihedral
