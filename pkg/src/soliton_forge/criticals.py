"""Critical soliton parameters E0 and E1 for the shrinking class.

With eta(., E) the exponential-weighted antiderivative of U*Q(U),

* E0 is the positive root of eta(-1, E) (the exponential part of phi vanishes),
* E1 is the root in (0, E0) of eta(1, E) - exp(2E) eta(-1, E) (phi(1) = 0).

Both are located by bracket expansion followed by bisection; uniqueness is
checked with a dense log-spaced sign scan and reported, not assumed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassMismatch, NoSignChange, OrderingViolation
from .model import BundleSpec, SolitonClass
from .poly import Polynomial, SmallExponentWarning, exp_weighted_antiderivative, q_from_eigenvalues
from .roots import bisect, sign_change_brackets

ROOT_TOL = 1e-12
SCAN_POINTS = 10_000
MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class CriticalValues:
    E0: float
    E1: float
    E0_bracket: tuple[float, float]
    E1_bracket: tuple[float, float]
    E0_residual: float
    E1_residual: float
    diagnostics: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "E0": self.E0,
            "E1": self.E1,
            "E0_bracket": list(self.E0_bracket),
            "E1_bracket": list(self.E1_bracket),
            "E0_residual": self.E0_residual,
            "E1_residual": self.E1_residual,
            "diagnostics": list(self.diagnostics),
        }


def _require_shrinking(spec: BundleSpec):
    if spec.soliton_class is not SolitonClass.SHRINKING:
        raise ClassMismatch(
            f"critical values are defined for shrinking only, got {spec.soliton_class.value}"
        )


def eta_polynomial(spec: BundleSpec, E: float) -> Polynomial:
    _require_shrinking(spec)
    Q = q_from_eigenvalues(spec.lambdas)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallExponentWarning)
        return exp_weighted_antiderivative(Polynomial((0.0, 1.0)) * Q, E)


def eta_at(spec: BundleSpec, U: float, E: float) -> float:
    return float(eta_polynomial(spec, E)(U))


def _eta_scale(eta: Polynomial, U: float) -> float:
    return sum(abs(c) * abs(U) ** k for k, c in enumerate(eta.coeffs)) or 1.0


def _eta_values(spec: BundleSpec, U: float, E):
    """eta(U, E) for scalar or array E, running the recurrence elementwise."""
    S = (Polynomial((0.0, 1.0)) * q_from_eigenvalues(spec.lambdas)).coeffs
    E = np.asarray(E, dtype=float)
    nxt = np.zeros_like(E)
    acc = np.zeros_like(E)
    for k in range(len(S) - 1, -1, -1):
        nxt = (S[k] + (k + 1) * nxt) / E
        acc = acc * U + nxt
    return acc


def e0_function(spec: BundleSpec):
    """E -> eta(-1, E); accepts arrays."""
    _require_shrinking(spec)
    return lambda E: _eta_values(spec, -1.0, E)


def e1_function(spec: BundleSpec):
    """E -> eta(1, E) - exp(2E) eta(-1, E); accepts arrays."""
    _require_shrinking(spec)
    return lambda E: _eta_values(spec, 1.0, E) - np.exp(2.0 * np.asarray(E)) * _eta_values(spec, -1.0, E)


def e0_relative_residual(spec: BundleSpec, E: float) -> float:
    eta = eta_polynomial(spec, E)
    return abs(eta(-1.0)) / _eta_scale(eta, -1.0)


def e1_relative_residual(spec: BundleSpec, E: float) -> float:
    eta = eta_polynomial(spec, E)
    a, b = eta(1.0), math.exp(2.0 * E) * eta(-1.0)
    return abs(a - b) / ((abs(a) + abs(b)) or 1.0)


def _log_scan(f, lo: float, hi: float, n: int = SCAN_POINTS):
    xs = np.geomspace(lo, hi, n)
    ys = f(xs)
    return sign_change_brackets(xs, ys)


def _find_E0(spec: BundleSpec):
    f = e0_function(spec)
    diag = []
    for k in range(1, MAX_DOUBLINGS + 1):
        lo, hi = 2.0**-k, 2.0**k
        if np.sign(f(lo)) != np.sign(f(hi)):
            break
    else:
        raise NoSignChange(f"eta(-1, E) keeps one sign on (2^-{MAX_DOUBLINGS}, 2^{MAX_DOUBLINGS})")
    root, bracket = bisect(lambda x: float(f(x)), lo, hi, xtol=ROOT_TOL)
    brackets = _log_scan(f, lo, hi)
    if len(brackets) != 1:
        diag.append(f"E0 sign scan found {len(brackets)} sign changes on ({lo:g}, {hi:g})")
    neg = _log_scan(lambda x: f(-x), lo, hi)
    if neg:
        diag.append(
            "eta(-1, E) also changes sign at negative E near "
            + ", ".join(f"{-0.5 * (a + b):.6g}" for a, b in neg)
            + " (not treated as E0)"
        )
    return root, bracket, diag


def find_E0(spec: BundleSpec) -> float:
    """Unique positive root of E -> eta(-1, E)."""
    _require_shrinking(spec)
    return _find_E0(spec)[0]


def _find_E1(spec: BundleSpec, E0: float):
    g = e1_function(spec)
    hi = E0
    ghi = g(hi)
    for k in range(1, MAX_DOUBLINGS + 1):
        lo = E0 * 2.0**-k
        if np.sign(g(lo)) != np.sign(ghi):
            break
    else:
        raise NoSignChange("eta(1, E) - exp(2E) eta(-1, E) keeps one sign on (0, E0)")
    root, bracket = bisect(lambda x: float(g(x)), lo, hi, xtol=ROOT_TOL)
    diag = []
    brackets = _log_scan(g, lo, hi)
    if len(brackets) != 1:
        diag.append(f"E1 sign scan found {len(brackets)} sign changes on ({lo:g}, {hi:g})")
    if not 0.0 < root < E0:
        raise OrderingViolation(f"expected 0 < E1 < E0, got E1 = {root!r}, E0 = {E0!r}")
    return root, bracket, diag


def find_E1(spec: BundleSpec, E0: float | None = None) -> float:
    """Root in (0, E0) of E -> eta(1, E) - exp(2E) eta(-1, E), i.e. phi(1) = 0."""
    _require_shrinking(spec)
    if E0 is None:
        E0 = find_E0(spec)
    return _find_E1(spec, E0)[0]


def critical_values(spec: BundleSpec) -> CriticalValues:
    _require_shrinking(spec)
    E0, b0, d0 = _find_E0(spec)
    E1, b1, d1 = _find_E1(spec, E0)
    return CriticalValues(
        E0=E0,
        E1=E1,
        E0_bracket=b0,
        E1_bracket=b1,
        E0_residual=e0_relative_residual(spec, E0),
        E1_residual=e1_relative_residual(spec, E1),
        diagnostics=tuple(d0 + d1),
    )
