import json

from ._dihedral import (
    ExponentReport,
    NumericalError,
    ValidationError,
    __version__,
    absorption_coefficient,
    bessel_kernel,
    critical_exponents,
    gamma_first_eigenvalue,
    kappa_roots,
    run_cli,
    sl_eigenvalue,
)
from . import _dihedral


def _measure(measure):
    return measure if isinstance(measure, str) else json.dumps(measure)


def F(tau, measure, nu, q, R=None):
    return _dihedral.F(tau, _measure(measure), nu, q, R)


def J(measure, N, k, gamma, R, q, eps=0.0):
    return _dihedral.J(_measure(measure), N, k, gamma, R, q, eps)


def besov_proxy(measure, s, q, eps):
    return json.loads(_dihedral.besov_proxy(_measure(measure), s, q, eps))


def bessel_capacity(points, alpha, p, resolution=3):
    return json.loads(_dihedral.bessel_capacity(points, alpha, p, resolution))


def classify(poly, q, set=None, measures=None):
    enc = lambda v: "" if v is None else _measure(v)
    return json.loads(_dihedral.classify(_measure(poly), q, enc(set), enc(measures)))


def experiment(name, measure=None, q=0.0):
    return json.loads(_dihedral.experiment(name, "" if measure is None else _measure(measure), q))


__all__ = [
    "ExponentReport",
    "NumericalError",
    "ValidationError",
    "F",
    "J",
    "absorption_coefficient",
    "besov_proxy",
    "bessel_capacity",
    "bessel_kernel",
    "classify",
    "critical_exponents",
    "experiment",
    "gamma_first_eigenvalue",
    "kappa_roots",
    "run_cli",
    "sl_eigenvalue",
]
