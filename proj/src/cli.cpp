#include "dihedral/cli.hpp"

#include <CLI11.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "dihedral/besov.hpp"
#include "dihedral/capacity.hpp"
#include "dihedral/classify.hpp"
#include "dihedral/error.hpp"
#include "dihedral/json_io.hpp"
#include "dihedral/kernels.hpp"
#include "dihedral/spectral.hpp"
#include "dihedral/verify.hpp"

#ifndef DIHEDRAL_VERSION
#define DIHEDRAL_VERSION "0.0.0"
#endif

namespace dihedral {

const char* version() noexcept { return DIHEDRAL_VERSION; }

namespace {

struct Options {
  std::optional<int> N, k;
  std::optional<double> alpha1, gamma, q, R;
  std::vector<std::string> intervals;
  bool pole_endpoints = false;
  double tol = 1e-8;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out;
  std::string format = "json";
  bool timing = false;

  std::string wedge, poly, set, measure, evidence;
  bool numeric = false;
  std::optional<double> s, eps, alpha, p;
  int resolution = 3;
  std::vector<std::string> points;
  std::vector<double> taus;
  std::string target = "v_A";
  double nu = 3.0, sigma = 0.5;
  int m = 1, j = 2;
  std::string experiment;
};

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(ErrorKind::Validation, field + ": cannot parse '" + text + "'", field);
    }
  }
  return out;
}

WedgeSpec wedge_from_flags(const Options& o) {
  WedgeSpec w;
  w.N = o.N.value_or(3);
  w.k = o.k.value_or(2);
  w.alpha1 = o.alpha1.value_or(kPi / 2);
  for (const auto& iv : o.intervals) {
    const auto v = parse_list(iv, "interval");
    if (v.size() != 2) throw ValidationError(ErrorKind::Validation, "interval: expected a,b", "interval");
    w.intervals.push_back({v[0], v[1]});
  }
  w.pole_endpoints = o.pole_endpoints;
  return w;
}

/// gamma from --gamma, else from the wedge flags through the SL chain.
double resolve_gamma(const Options& o, int N, int k) {
  if (o.gamma) return *o.gamma;
  if (k == 1) return 0.0;
  WedgeSpec w = wedge_from_flags(o);
  w.N = N;
  w.k = k;
  return gamma_first_eigenvalue(validate_wedge(w), o.tol);
}

double require(const std::optional<double>& v, const char* flag) {
  if (!v) throw ValidationError(ErrorKind::Configuration, std::string("missing required flag ") + flag, flag);
  return *v;
}

Json base_config(const Options& o, const std::string& command) {
  Json c;
  c["command"] = command;
  c["tol"] = o.tol;
  c["seed"] = o.seed;
  c["threads"] = o.threads;
  c["format"] = o.format;
  return c;
}

Json envelope(const Json& config, const Json& result) {
  Json j;
  j["version"] = version();
  j["config"] = config;
  j["result"] = result;
  return j;
}

NullTest parse_state(const std::string& s, const std::string& field) {
  if (s == "null") return NullTest::Null;
  if (s == "positive") return NullTest::Positive;
  if (s == "needs-numeric") return NullTest::NeedsNumeric;
  throw ValidationError(ErrorKind::Validation, field + ": expected null, positive or needs-numeric", field);
}

CapacityEvidence evidence_from_json(const Json& j) {
  CapacityEvidence out;
  if (!j.contains("evidence") || !j["evidence"].is_array())
    throw ValidationError(ErrorKind::Validation, "evidence: expected an array", "evidence");
  for (std::size_t i = 0; i < j["evidence"].size(); ++i) {
    const std::string f = "evidence[" + std::to_string(i) + "]";
    const Json& e = j["evidence"][i];
    if (!e.contains("piece") || !e.contains("state") || !e["state"].is_string())
      throw ValidationError(ErrorKind::Validation, f + ": needs piece and state", f);
    Json wrapper{{"pieces", Json::array({e["piece"]})}};
    out.push_back({set_from_json(wrapper).pieces.front(), parse_state(e["state"].get<std::string>(), f + ".state")});
  }
  return out;
}

Json cmd_exponents(const Options& o, Json& config) {
  ExponentReport rep;
  if (!o.wedge.empty()) {
    const WedgeSpec w = validate_wedge(wedge_from_json(read_json_file(o.wedge)));
    config["wedge"] = to_json(w);
    rep = w.k == 1 ? critical_exponents(w.N, 1, 0.0) : critical_exponents(w.N, w.k, gamma_first_eigenvalue(w, o.tol));
  } else {
    const int N = o.N.value_or(3), k = o.k.value_or(2);
    config["N"] = N;
    config["k"] = k;
    if (o.gamma) {
      config["gamma"] = *o.gamma;
    } else if (k > 1) {
      WedgeSpec w = wedge_from_flags(o);
      config["wedge"] = to_json(w);
    }
    rep = critical_exponents(N, k, resolve_gamma(o, N, k));
  }
  Json result = to_json(rep);
  if (o.q) {
    config["q"] = *o.q;
    result["s"] = rep.s(*o.q);
  }
  return result;
}

Json cmd_classify(const Options& o, Json& config) {
  if (o.poly.empty()) throw ValidationError(ErrorKind::Configuration, "classify needs --poly", "poly");
  const double q = require(o.q, "--q");
  const PolyhedronSpec poly = validate_polyhedron(polyhedron_from_json(read_json_file(o.poly)));
  config["poly"] = o.poly;
  config["q"] = q;
  const auto reps = polyhedron_exponents(poly, o.tol);
  Json result;
  Json verdicts = Json::array();
  for (const auto& s : poly.strata) verdicts.push_back(to_json(stratum_verdict(reps.at(s.id), s.id, q)));
  result["verdicts"] = verdicts;
  CapacityEvidence evidence;
  if (!o.evidence.empty()) {
    config["evidence"] = o.evidence;
    evidence = evidence_from_json(read_json_file(o.evidence));
  }
  if (!o.set.empty()) {
    config["set"] = o.set;
    config["numeric"] = o.numeric;
    const CompactSetDescription E = validate_set(poly, set_from_json(read_json_file(o.set)));
    if (o.numeric)
      for (const auto& piece : E.pieces) {
        const ExponentReport& rep = reps.at(piece.stratum);
        const Verdict v = stratum_verdict(rep, piece.stratum, q);
        if (v.regime == Regime::CapacityRegime && piece.kind == PieceKind::Grid)
          evidence.push_back({piece, numeric_evidence(piece, rep, q, o.resolution)});
      }
    result["removability"] = to_json(removable_check(poly, E, q, evidence));
  }
  if (!o.measure.empty()) {
    config["measure"] = o.measure;
    const StratumMeasures mu = stratum_measures_from_json(read_json_file(o.measure));
    result["good_measure"] = to_json(good_measure_check(poly, mu, q, evidence));
  }
  return result;
}

Json cmd_kernel(const Options& o, Json& config) {
  if (o.measure.empty()) throw ValidationError(ErrorKind::Configuration, "kernel needs --measure", "measure");
  const int N = o.N.value_or(3), k = o.k.value_or(2);
  const double q = require(o.q, "--q");
  const DiscreteMeasure mu = validate_measure(measure_from_json(read_json_file(o.measure)));
  const ExponentReport rep = critical_exponents(N, k, resolve_gamma(o, N, k));
  const double R = o.R.value_or(default_radius(mu));
  QuadratureSpec spec{1e-7};
  spec.epsilon = o.eps.value_or(0.0);
  config["measure"] = o.measure;
  config["N"] = N;
  config["k"] = k;
  config["gamma"] = rep.gamma;
  config["q"] = q;
  config["R"] = R;
  config["eps"] = spec.epsilon;
  Json result;
  result["nu"] = rep.nu();
  result["m"] = rep.m();
  result["s"] = rep.s(q);
  result["J_AR"] = J_AR(mu, rep, R, q, spec);
  Json F = Json::array();
  for (double t : o.taus) F.push_back(Json{{"tau", t}, {"F", F_nu_m(t, mu, rep.nu(), q, R, spec)}});
  result["F_R"] = F;
  return result;
}

Json cmd_besov(const Options& o, Json& config) {
  if (o.measure.empty()) throw ValidationError(ErrorKind::Configuration, "besov needs --measure", "measure");
  const DiscreteMeasure mu = validate_measure(measure_from_json(read_json_file(o.measure)));
  const double s = require(o.s, "--s");
  const double q = require(o.q, "--q");
  const double eps = o.eps.value_or(1e-2);
  config["measure"] = o.measure;
  config["s"] = s;
  config["q"] = q;
  config["eps"] = eps;
  return to_json(besov_neg_proxy(mu, s, q, eps));
}

Json cmd_capacity(const Options& o, Json& config) {
  PointSet K;
  if (!o.set.empty()) {
    config["set"] = o.set;
    const CompactSetDescription E = set_from_json(read_json_file(o.set));
    for (std::size_t i = 0; i < E.pieces.size(); ++i) {
      const auto& piece = E.pieces[i];
      if (piece.kind == PieceKind::Point) K.push_back(piece.center);
      else if (piece.kind == PieceKind::Grid) K.insert(K.end(), piece.points.begin(), piece.points.end());
      else
        throw ValidationError(ErrorKind::Validation, "ball pieces have no numeric capacity; use classify",
                              "pieces[" + std::to_string(i) + "].kind");
    }
  }
  for (const auto& p : o.points) K.push_back(parse_list(p, "point"));
  if (K.empty()) throw ValidationError(ErrorKind::Configuration, "capacity needs --set or --point", "point");
  const int dim = static_cast<int>(K.front().size());
  const double alpha = require(o.alpha, "--alpha");
  const double p = o.p.value_or(2.0);
  config["alpha"] = alpha;
  config["p"] = p;
  config["dim"] = dim;
  config["resolution"] = o.resolution;
  config["points"] = K;
  return to_json(bessel_capacity(K, dim, alpha, p, o.resolution));
}

ExperimentReport cmd_verify(const Options& o, Json& config) {
  const std::string& name = o.experiment;
  config["experiment"] = name;
  if (name == "dichotomy") {
    DichotomyConfig c;
    c.N = o.N.value_or(3);
    c.k = o.k.value_or(2);
    c.gamma = resolve_gamma(o, c.N, c.k);
    c.q = o.q.value_or(2.0);
    config.update(Json{{"N", c.N}, {"k", c.k}, {"gamma", c.gamma}, {"q", c.q}});
    return dichotomy_experiment(c);
  }
  if (name == "equivalence") {
    EquivalenceConfig c;
    c.N = o.N.value_or(3);
    c.k = o.k.value_or(2);
    c.gamma = resolve_gamma(o, c.N, c.k);
    c.q = o.q.value_or(1.8);
    c.R = o.R.value_or(8.0);
    c.seed = o.seed;
    c.threads = o.threads;
    if (o.eps) c.epsilon = *o.eps;
    config.update(Json{{"N", c.N}, {"k", c.k}, {"gamma", c.gamma}, {"q", c.q}, {"R", c.R}, {"eps", c.epsilon},
                       {"R_grid", c.R_grid}, {"family_size", c.family_size}});
    return equivalence_experiment(c);
  }
  if (name == "remainder") {
    RemainderConfig c;
    c.params.nu = o.nu;
    c.params.sigma = o.sigma;
    c.params.m = o.m;
    c.params.j = o.j;
    c.params.q = o.q.value_or(2.0);
    DiscreteMeasure mu;
    if (!o.measure.empty()) {
      mu = validate_measure(measure_from_json(read_json_file(o.measure)));
      config["measure"] = o.measure;
    } else {
      mu.m = o.m;
      mu.atoms.push_back({std::vector<double>(o.m, 0.0), 1.0});
      config["measure"] = "delta_0";
    }
    config.update(Json{{"nu", c.params.nu}, {"sigma", c.params.sigma}, {"m", c.params.m}, {"j", c.params.j},
                       {"q", c.params.q}, {"R_grid", c.R_grid}});
    return remainder_experiment(mu, c);
  }
  if (name == "harmonicity") {
    HarmonicityConfig c;
    c.N = o.N.value_or(3);
    c.k = o.k.value_or(2);
    c.alpha1 = o.alpha1.value_or(kPi / 2);
    if (o.target == "v_A") c.target = HarmonicTarget::VA;
    else if (o.target == "K_A") c.target = HarmonicTarget::MartinKernel;
    else throw ValidationError(ErrorKind::Validation, "target: expected v_A or K_A", "target");
    config.update(Json{{"N", c.N}, {"k", c.k}, {"alpha1", c.alpha1}, {"target", o.target}, {"h_grid", c.h_grid}});
    return harmonicity_experiment(c);
  }
  if (name == "heat") {
    HeatConfig c;
    c.k = o.k.value_or(2);
    c.m = o.N ? *o.N - c.k : 1;
    c.R = o.R.value_or(4.0);
    c.gamma = resolve_gamma(o, c.k + c.m, c.k);
    c.q = o.q.value_or(1.8);
    c.seed = o.seed;
    if (c.m == 2) c.divisions = {8, 16, 32};
    config.update(Json{{"N", c.k + c.m}, {"k", c.k}, {"R", c.R}, {"gamma", c.gamma}, {"q", c.q},
                       {"divisions", c.divisions}});
    return heat_lifting(c);
  }
  throw ValidationError(ErrorKind::Configuration, "unknown experiment '" + name + "'", "experiment");
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--N", o.N, "ambient dimension");
  sub->add_option("--k", o.k, "wedge codimension of the edge");
  sub->add_option("--alpha1", o.alpha1, "periodic opening angle (radians)");
  sub->add_option("--interval", o.intervals, "polar interval a,b (repeatable)");
  sub->add_flag("--pole-endpoints", o.pole_endpoints, "allow intervals ending at a pole (bounded mode)");
  sub->add_option("--gamma", o.gamma, "first eigenvalue of the opening");
  sub->add_option("--q", o.q, "absorption exponent");
  sub->add_option("--R", o.R, "truncation radius");
  sub->add_option("--tol", o.tol, "eigenvalue tolerance");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "output file (written atomically)");
  sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical exponents, kernels, norms and capacities for dihedral boundary singularities", "dihedral"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  Options o;

  auto* ex = app.add_subcommand("exponents", "critical exponents of a wedge");
  add_common(ex, o);
  ex->add_option("--wedge", o.wedge, "wedge JSON file");

  auto* cl = app.add_subcommand("classify", "regimes, removability and good-measure verdicts");
  add_common(cl, o);
  cl->add_option("--poly", o.poly, "polyhedron JSON file");
  cl->add_option("--set", o.set, "compact set JSON file");
  cl->add_option("--measure", o.measure, "per-stratum measures JSON file");
  cl->add_option("--evidence", o.evidence, "capacity evidence JSON file");
  cl->add_flag("--numeric", o.numeric, "compute numeric evidence for grid pieces");
  cl->add_option("--resolution", o.resolution, "capacity refinement depth");

  auto* ke = app.add_subcommand("kernel", "truncated kernel functional J_{A,R}");
  add_common(ke, o);
  ke->add_option("--measure", o.measure, "measure JSON file");
  ke->add_option("--eps", o.eps, "inner cutoff");
  ke->add_option("--tau", o.taus, "evaluate F^R at tau (repeatable)");

  auto* be = app.add_subcommand("besov", "negative-order Besov proxy");
  add_common(be, o);
  be->add_option("--measure", o.measure, "measure JSON file");
  be->add_option("--s", o.s, "smoothness s > 0");
  be->add_option("--eps", o.eps, "cutoff");

  auto* ca = app.add_subcommand("capacity", "Bessel capacity of a finite set");
  add_common(ca, o);
  ca->add_option("--set", o.set, "set JSON file");
  ca->add_option("--point", o.points, "point x1,x2,.. (repeatable)");
  ca->add_option("--alpha", o.alpha, "Bessel order");
  ca->add_option("--p", o.p, "exponent p > 1");
  ca->add_option("--resolution", o.resolution, "refinement depth");

  auto* ve = app.add_subcommand("verify", "numerical experiments");
  add_common(ve, o);
  ve->add_option("experiment", o.experiment, "dichotomy | equivalence | remainder | harmonicity | heat")
      ->required()
      ->check(CLI::IsMember({"dichotomy", "equivalence", "remainder", "harmonicity", "heat"}));
  ve->add_option("--measure", o.measure, "measure JSON file (remainder)");
  ve->add_option("--eps", o.eps, "common cutoff (equivalence)");
  ve->add_option("--target", o.target, "v_A or K_A (harmonicity)");
  ve->add_option("--nu", o.nu, "kernel order (remainder)");
  ve->add_option("--sigma", o.sigma, "weight exponent (remainder)");
  ve->add_option("--m", o.m, "edge dimension (remainder)");
  ve->add_option("--j", o.j, "half-space dimension (remainder)");
  ve->add_flag("--timing", o.timing, "include runtimes in the output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    std::string text;
    CLI::App* sub = app.get_subcommands().front();
    Json config = base_config(o, sub->get_name());
    if (sub == ve) {
      const ExperimentReport rep = cmd_verify(o, config);
      if (o.format == "csv") text = to_csv({rep}, o.timing);
      else text = dump(envelope(config, to_json(rep, o.timing))) + "\n";
    } else {
      if (o.format != "json") throw ValidationError(ErrorKind::Configuration, "csv output is only for verify", "format");
      Json result;
      if (sub == ex) result = cmd_exponents(o, config);
      else if (sub == cl) result = cmd_classify(o, config);
      else if (sub == ke) result = cmd_kernel(o, config);
      else if (sub == be) result = cmd_besov(o, config);
      else result = cmd_capacity(o, config);
      text = dump(envelope(config, result)) + "\n";
    }
    if (o.out.empty()) out << text;
    else write_file_atomic(o.out, text);
    return 0;
  } catch (const ValidationError& e) {
    err << "validation error [" << to_string(e.kind()) << "]";
    if (!e.field().empty()) err << " (" << e.field() << ")";
    err << ": " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error [" << to_string(e.kind()) << "]: " << e.what() << " (estimate " << e.estimate() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace dihedral
