"""Invariant suites run by ``soliton-forge verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classify import umax_of
from .geometry import GeometryTable, ricci_eigenvalues, sample_geometry
from .model import SolitonClass
from .oracle import fd_ricci_oracle, ode_phi_oracle, quad_phi_oracle
from .profile import SolitonProfile, phi, residual_scale

# base tolerances; every one is multiplied by tol_scale
ODE_TOL = 1e-9
QUAD_TOL = 1e-8
ODE_ORACLE_TOL = 1e-6
RICCI_TOL = 1e-6
IDENTITY_TOL = 1e-8
SIGN_TOL = 1e-10
# the forward integral oracles lose about exp(E (U - Umin)) ulps for E > 0
ORACLE_GROWTH = 10.0


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""
    skipped: bool = False

    def line(self) -> str:
        if self.skipped:
            return f"SKIP {self.name:14s} {self.detail}".rstrip()
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name:14s} worst={self.worst:.3e} tol={self.tolerance:.1e} {self.detail}".rstrip()


@dataclass(frozen=True)
class VerificationReport:
    suites: tuple[SuiteResult, ...]
    table: GeometryTable = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def failing(self) -> list[str]:
        return [s.name for s in self.suites if not s.passed]


def _suite(name, values, tol, detail=""):
    worst = float(np.max(values)) if len(values) else 0.0
    return SuiteResult(name, bool(worst <= tol), worst, tol, detail)


def _interior(table: GeometryTable, k: int) -> list[float]:
    rows = table.rows
    n = len(rows)
    lo, hi = max(1, n // 10), max(2, n - n // 10)
    idx = np.unique(np.linspace(lo, hi - 1, min(k, hi - lo)).astype(int))
    return [rows[i].U for i in idx if rows[i].phi > 0]


def run_verification(
    profile: SolitonProfile,
    *,
    n_samples: int = 200,
    u_cap: float | None = None,
    umax: float | None = None,
    eps: float | None = None,
    tol_scale: float = 1.0,
) -> VerificationReport:
    if umax is None:
        umax = umax_of(profile)
    table = sample_geometry(profile, n_samples, u_cap, umax=umax, eps=eps)
    arr = table.as_array()
    cols = table.columns()
    U = arr[:, 0]
    suites = []

    scale = residual_scale(profile, U)
    suites.append(_suite("ode_residual", np.abs(arr[:, cols.index("ode_residual")]) / scale, ODE_TOL * tol_scale))

    pts = _interior(table, 20)
    if profile.E > 0:
        lim = profile.umin + ORACLE_GROWTH / profile.E
        pts = [x for x in pts if x <= lim] or list(
            np.linspace(profile.umin, min(lim, table.u_cap), 12)[1:-1]
        )
    rel = [abs(phi(profile, x) / quad_phi_oracle(profile.spec, profile.E, profile.umin, x) - 1.0) for x in pts]
    suites.append(_suite("oracle_quad", rel, QUAD_TOL * tol_scale))
    rel = [abs(phi(profile, x) / ode_phi_oracle(profile, x) - 1.0) for x in pts[::4]]
    suites.append(_suite("oracle_ode", rel, ODE_ORACLE_TOL * tol_scale))

    diffs = []
    for x in pts[::2]:
        a_f, a_b = ricci_eigenvalues(profile, x, table.einstein_sign)
        o_f, o_b = fd_ricci_oracle(profile, x, eps=table.einstein_sign)
        diffs.append(max([abs(a_f - o_f)] + [abs(p - q) for p, q in zip(a_b, o_b)]))
    suites.append(_suite("oracle_ricci", diffs, RICCI_TOL * tol_scale))

    if profile.soliton_class is SolitonClass.EXPANDING and table.einstein_sign != -1.0:
        suites.append(
            SuiteResult(
                "identity", True, math.nan, IDENTITY_TOL,
                "base Einstein sign +1 does not solve the expanding base equation",
                skipped=True,
            )
        )
    else:
        ident = np.abs(arr[:, cols.index("identity_residual")])
        suites.append(
            _suite("identity", ident, IDENTITY_TOL * tol_scale * (1.0 + abs(table.identity_constant)))
        )

    # signs: metric positivity everywhere; Ricci signs for complete steady solitons
    neg = [max(0.0, -v) for v in arr[:, cols.index("phi")]]
    for lam in profile.spec.lambdas:
        neg.extend(np.maximum(0.0, -(1.0 - U * lam)))
    detail = "metric positivity"
    if profile.soliton_class is SolitonClass.STEADY and profile.E < 0:
        detail += " + steady Ricci signs"
        fiber = arr[:, cols.index("ric_fiber")]
        neg.extend(np.where(fiber > 0, 0.0, np.abs(fiber) + SIGN_TOL * 10))
        for i in range(profile.spec.base_dim):
            base = arr[:, cols.index(f"ric_base_{i + 1}")]
            neg.append(abs(base[0]))
            neg.extend(np.where(base[1:] > 0, 0.0, np.abs(base[1:]) + SIGN_TOL * 10))
    suites.append(_suite("signs", neg, SIGN_TOL * tol_scale, detail))

    t = arr[:, cols.index("t")]
    r = arr[:, cols.index("r")]
    bad = np.concatenate([np.maximum(0.0, -np.diff(t)), np.maximum(0.0, -np.diff(r))])
    ok = bool(np.all(np.diff(t) > 0) and np.all(np.diff(r) > 0))
    worst = float(bad.max()) if bad.size else 0.0
    tol = 0.0 if tol_scale >= 0 else -1.0
    suites.append(SuiteResult("monotonicity", ok and worst <= tol, worst, tol, "t and r strictly increasing"))

    return VerificationReport(tuple(suites), table)
