#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "dihedral/besov.hpp"
#include "dihedral/capacity.hpp"
#include "dihedral/classify.hpp"
#include "dihedral/cli.hpp"
#include "dihedral/error.hpp"
#include "dihedral/exponents.hpp"
#include "dihedral/json_io.hpp"
#include "dihedral/kernels.hpp"
#include "dihedral/spectral.hpp"
#include "dihedral/verify.hpp"

namespace py = pybind11;
using namespace dihedral;

namespace {

DiscreteMeasure measure_of(const std::string& text) { return measure_from_json(parse_json(text, "measure")); }

WedgeSpec wedge_of(int N, int k, double alpha1, const std::vector<std::pair<double, double>>& intervals,
                   bool pole_endpoints) {
  WedgeSpec w;
  w.N = N;
  w.k = k;
  w.alpha1 = alpha1;
  w.intervals = intervals;
  w.pole_endpoints = pole_endpoints;
  return w;
}

std::string classify_json(const std::string& poly, double q, const std::string& set, const std::string& measures) {
  const auto p = polyhedron_from_json(parse_json(poly, "poly"));
  Json out;
  Json strata = Json::array();
  for (const auto& s : p.strata) strata.push_back(to_json(stratum_verdict(p.N, s, q)));
  out["strata"] = strata;
  if (!set.empty()) out["removability"] = to_json(removable_check(p, set_from_json(parse_json(set, "set")), q));
  if (!measures.empty())
    out["good_measure"] = to_json(good_measure_check(p, stratum_measures_from_json(parse_json(measures, "measure")), q));
  return dump(out);
}

std::string experiment_json(const std::string& name, const std::string& measure, double q) {
  if (name == "dichotomy") {
    DichotomyConfig c;
    c.q = q > 0 ? q : 2.0;
    return dump(to_json(dichotomy_experiment(c)));
  }
  if (name == "equivalence") {
    EquivalenceConfig c;
    if (q > 0) c.q = q;
    return dump(to_json(equivalence_experiment(c)));
  }
  if (name == "remainder") {
    const DiscreteMeasure mu = measure.empty() ? DiscreteMeasure{1, {{{0.0}, 1.0}}} : measure_of(measure);
    return dump(to_json(remainder_experiment(mu, RemainderConfig{})));
  }
  if (name == "harmonicity") return dump(to_json(harmonicity_experiment(HarmonicityConfig{})));
  if (name == "heat") {
    HeatConfig c;
    if (q > 0) c.q = q;
    return dump(to_json(heat_lifting(c)));
  }
  throw ValidationError(ErrorKind::Configuration, "unknown experiment '" + name + "'", "experiment");
}

}  // namespace

PYBIND11_MODULE(_dihedral, m) {
  m.doc() = "Critical exponents, capacities and verification experiments for polyhedral wedges";
  m.attr("__version__") = version();

  static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      validation_error(e.what());
    } catch (const NumericalError& e) {
      numerical_error(e.what());
    }
  });

  py::class_<ExponentReport>(m, "ExponentReport")
      .def_readonly("N", &ExponentReport::N)
      .def_readonly("k", &ExponentReport::k)
      .def_readonly("gamma", &ExponentReport::gamma)
      .def_readonly("lambda_A", &ExponentReport::lambda_A)
      .def_readonly("kappa_plus", &ExponentReport::kappa_plus)
      .def_readonly("kappa_minus", &ExponentReport::kappa_minus)
      .def_readonly("q_c", &ExponentReport::q_c)
      .def_readonly("q_c_star", &ExponentReport::q_c_star)
      .def("s", &ExponentReport::s, py::arg("q"))
      .def("nu", &ExponentReport::nu)
      .def("__repr__", [](const ExponentReport& r) {
        std::ostringstream os;
        os << "ExponentReport(N=" << r.N << ", k=" << r.k << ", gamma=" << r.gamma << ", q_c=" << r.q_c
           << ", q_c_star=" << r.q_c_star << ")";
        return os.str();
      });

  m.def("critical_exponents", &critical_exponents, py::arg("N"), py::arg("k"), py::arg("gamma"));
  m.def("kappa_roots", &kappa_roots, py::arg("N"), py::arg("lambda_A"));
  m.def("absorption_coefficient", &absorption_coefficient, py::arg("N"), py::arg("q"));

  m.def(
      "gamma_first_eigenvalue",
      [](int N, int k, double alpha1, const std::vector<std::pair<double, double>>& intervals, bool pole_endpoints,
         double tol) { return gamma_first_eigenvalue(wedge_of(N, k, alpha1, intervals, pole_endpoints), tol); },
      py::arg("N"), py::arg("k"), py::arg("alpha1"), py::arg("intervals") = std::vector<std::pair<double, double>>{},
      py::arg("pole_endpoints") = false, py::arg("tol") = 1e-8);
  m.def(
      "sl_eigenvalue",
      [](double a, double b, int d, double mu, bool bounded_left, bool bounded_right, double tol) {
        SLProblem p;
        p.a = a;
        p.b = b;
        p.d = d;
        p.mu = mu;
        p.left = bounded_left ? EndpointKind::Bounded : EndpointKind::Dirichlet;
        p.right = bounded_right ? EndpointKind::Bounded : EndpointKind::Dirichlet;
        return sl_eigen_1d(p, tol).gamma;
      },
      py::arg("a"), py::arg("b"), py::arg("d"), py::arg("mu"), py::arg("bounded_left") = false,
      py::arg("bounded_right") = false, py::arg("tol") = 1e-8);

  m.def(
      "F",
      [](double tau, const std::string& measure, double nu, double q, std::optional<double> R) {
        return F_nu_m(tau, measure_of(measure), nu, q, R);
      },
      py::arg("tau"), py::arg("measure"), py::arg("nu"), py::arg("q"), py::arg("R") = py::none());
  m.def(
      "J",
      [](const std::string& measure, int N, int k, double gamma, double R, double q, double eps) {
        QuadratureSpec spec;
        spec.epsilon = eps;
        return J_AR(measure_of(measure), critical_exponents(N, k, gamma), R, q, spec);
      },
      py::arg("measure"), py::arg("N"), py::arg("k"), py::arg("gamma"), py::arg("R"), py::arg("q"),
      py::arg("eps") = 0.0);
  m.def(
      "besov_proxy",
      [](const std::string& measure, double s, double q, double eps) {
        return dump(to_json(besov_neg_proxy(measure_of(measure), s, q, eps)));
      },
      py::arg("measure"), py::arg("s"), py::arg("q"), py::arg("eps"));

  m.def(
      "bessel_kernel", [](const std::vector<double>& x, double alpha) { return bessel_kernel(x, alpha); },
      py::arg("x"), py::arg("alpha"));
  m.def(
      "bessel_capacity",
      [](const PointSet& points, double alpha, double p, int resolution) {
        if (points.empty()) throw ValidationError(ErrorKind::Configuration, "empty point set", "points");
        return dump(to_json(bessel_capacity(points, static_cast<int>(points.front().size()), alpha, p, resolution)));
      },
      py::arg("points"), py::arg("alpha"), py::arg("p"), py::arg("resolution") = 3);

  m.def("classify", &classify_json, py::arg("poly"), py::arg("q"), py::arg("set") = "", py::arg("measures") = "");
  m.def("experiment", &experiment_json, py::arg("name"), py::arg("measure") = "", py::arg("q") = 0.0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"dihedral"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
