"""Completeness classification from endpoint behaviour of phi.

The metric closes up smoothly at Umin (simple zero of phi). What happens at the
far end decides the case:

* phi > 0 up to infinity with at most linear growth: r and t both run to
  infinity, complete noncompact metric on the total space;
* phi > 0 up to infinity with exponential growth: r stays bounded, the metric
  is not defined on all of the punctured bundle;
* phi returns to zero at a finite Umax: finite arclength; only Umax = 1 lets
  the shrinking metric be compactified to the projective bundle.

Verdicts are derived from analytic zero orders and growth degrees and then
cross-checked against the parameter rules (E versus E0, E1 and the sign of E).
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .criticals import CriticalValues, critical_values
from .errors import ClassificationConflict, RangeOverflow, UndeterminedGrowth
from .model import BundleSpec, SolitonClass
from .poly import Polynomial
from .profile import EXP_LIMIT, SolitonProfile, build_profile, numerator
from .roots import bisect

DECISION_BAND = 1e-9
UMAX_TOL = 0.0  # bisect to machine resolution


class Location(enum.Enum):
    AT_UMIN = "AtUmin"
    AT_FINITE_UMAX = "AtFiniteUmax"
    AT_INFINITY = "AtInfinity"


class Case(enum.Enum):
    COMPLETE_NONCOMPACT = "CompleteNoncompact"
    ILL_DEFINED = "IllDefined"
    COMPACT_PROJECTIVE = "CompactProjective"
    INCOMPLETE_AT_INFINITY = "IncompleteAtInfinity"


@dataclass(frozen=True)
class EndpointBehavior:
    """Local behaviour of phi at one end of [Umin, Umax].

    ``phi_order`` is the order of the zero at a finite endpoint, or the growth
    degree d (phi ~ c U^d) at infinity; it is None for exponential growth.
    """

    location: Location
    phi_order: int | None
    growth: str  # "zero" | "polynomial" | "exponential"
    r_integral_diverges: bool
    t_integral_diverges: bool
    t_integral_converges_at_umin: bool = True

    def to_dict(self) -> dict:
        return {
            "location": self.location.value,
            "phi_order": self.phi_order,
            "growth": self.growth,
            "r_integral_diverges": self.r_integral_diverges,
            "t_integral_diverges": self.t_integral_diverges,
            "t_integral_converges_at_umin": self.t_integral_converges_at_umin,
        }


@dataclass(frozen=True)
class CompletenessReport:
    case: Case
    umax: float
    umin: float
    E: float
    E_used: float
    umin_behavior: EndpointBehavior
    umax_behavior: EndpointBehavior
    gt_positive: bool
    outside_theory: bool = False
    criticals: CriticalValues | None = None
    diagnostics: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "umax": self.umax if math.isfinite(self.umax) else "inf",
            "umin": self.umin,
            "E": self.E,
            "E_used": self.E_used,
            "umin_behavior": self.umin_behavior.to_dict(),
            "umax_behavior": self.umax_behavior.to_dict(),
            "gt_positive": self.gt_positive,
            "outside_theory": self.outside_theory,
            "criticals": self.criticals.to_dict() if self.criticals else None,
            "diagnostics": list(self.diagnostics),
        }


def _source_positive_beyond(profile: SolitonProfile) -> bool:
    """True if s(U) Q(U) > 0 for every U > Umin.

    Then N = phi Q can never return to zero: N' = E N + sQ is positive at any
    zero of N, so N cannot approach zero from above.
    """
    S = profile.source * profile.Q
    Sh = S.shifted(profile.umin)
    if Sh.is_zero() or Sh.coeffs[-1] <= 0:
        return False
    if Sh.degree == 0:
        return True
    roots = np.roots(Sh.coeffs[::-1])
    real = roots[np.abs(roots.imag) <= 1e-12 * (1 + np.abs(roots.real))].real
    return not np.any(real > 0) and Sh(0.0) >= 0.0


def _cauchy_bound(coeffs) -> float:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    if len(c) <= 1:
        return 0.0
    return 1.0 + max(abs(x / c[-1]) for x in c[:-1])


def _asymptotic_polynomial(profile: SolitonProfile):
    """Polynomial (in h = U - Umin) that N approaches when no growing exponential is present."""
    P = profile.poly_part
    c = profile.exp_coeff
    if c != 0.0 and profile.E < 0:
        P = P - Polynomial((c,))
    return P


def umax_of(profile: SolitonProfile) -> float:
    """First zero of phi beyond Umin, or ``math.inf`` if phi stays positive."""
    if _source_positive_beyond(profile):
        return math.inf

    E, c = profile.E, profile.exp_coeff
    growing = c != 0.0 and E > 0
    if growing:
        H = EXP_LIMIT / E * (1.0 - 1e-12)  # keep umin + H - umin under the guard
    else:
        P = _asymptotic_polynomial(profile)
        H = max(100.0, 2.0 * _cauchy_bound(P.coeffs))
        if c != 0.0:
            H += 40.0 / abs(E)
    near = np.linspace(0.0, min(H, 10.0), 2001)[1:]
    far = np.geomspace(10.0, H, 4000)[1:] if H > 10.0 else np.empty(0)
    hs = np.concatenate([near, far])
    with np.errstate(over="ignore"):
        # c*exp(E h) may overflow to +-inf near the guard; the sign is still right
        N = numerator(profile, profile.umin + hs)
    neg = np.nonzero(N <= 0.0)[0]
    if neg.size:
        i = int(neg[0])
        lo = hs[i - 1] if i > 0 else 0.0
        if N[i] == 0.0:
            return float(profile.umin + hs[i])
        _, (blo, _) = bisect(
            lambda h: float(numerator(profile, profile.umin + h)), lo, float(hs[i]), xtol=UMAX_TOL
        )
        # the phi >= 0 side of the final bracket keeps sqrt(phi) real up to Umax
        return float(profile.umin + blo)
    if growing:
        if c > 0:
            return math.inf
        raise RangeOverflow(
            "phi must return to zero (negative exponential term) but no zero was found"
            f" before E*(U - Umin) = {EXP_LIMIT:g}",
            {"E": E, "umin": profile.umin, "scanned_to": profile.umin + H, "phi_numerator_at_end": float(N[-1])},
        )
    lead = _asymptotic_polynomial(profile)
    if lead.is_zero() or lead.coeffs[-1] <= 0:
        raise UndeterminedGrowth(
            f"no zero found up to U = {profile.umin + H:g} but the asymptotic numerator is not positive"
        )
    return math.inf


def endpoint_analysis(
    profile: SolitonProfile, location: Location | str, umax: float | None = None
) -> EndpointBehavior:
    location = Location(location)
    if location is Location.AT_UMIN:
        order = _zero_order(profile, profile.umin)
        return EndpointBehavior(location, order, "zero", True, False, order < 2)
    if location is Location.AT_FINITE_UMAX:
        if umax is None:
            umax = umax_of(profile)
        if not math.isfinite(umax):
            raise ValueError("phi has no finite Umax")
        order = _zero_order(profile, umax)
        return EndpointBehavior(location, order, "zero", True, order >= 2)

    if profile.exp_coeff != 0.0 and profile.E > 0:
        if profile.exp_coeff < 0:
            raise UndeterminedGrowth(
                f"exponential term with E = {profile.E:g} > 0 drives phi negative; there is no infinite end"
            )
        return EndpointBehavior(location, None, "exponential", False, False)
    P = _asymptotic_polynomial(profile)
    if P.is_zero() or P.coeffs[-1] <= 0:
        raise UndeterminedGrowth("phi does not stay positive at infinity")
    d = P.degree - profile.Q.degree
    return EndpointBehavior(location, d, "polynomial", d <= 1, d <= 2)


def _zero_order(profile: SolitonProfile, U: float) -> int:
    """Order of the zero of N = phi*Q at U, by counting vanishing derivatives."""
    scale = 1.0 + abs(profile.exp_coeff) * max(1.0, abs(profile.E)) ** 2 + profile.poly_part.max_abs_coeff()
    scale *= max(1.0, abs(U - profile.umin)) ** max(profile.poly_part.degree, 0)
    for k in (1, 2):
        if abs(numerator(profile, U, k)) > 1e-8 * scale:
            return k
    return 3


def _gt_positive(spec: BundleSpec, umin: float, umax: float) -> bool:
    for lam in spec.lambdas:
        if not 1.0 - umin * lam > 0.0:
            return False
        if math.isfinite(umax):
            if not 1.0 - umax * lam > 0.0:
                return False
        elif lam > 0.0:
            return False
    return True


def _derived_case(profile: SolitonProfile, umax: float, end: EndpointBehavior) -> Case:
    if math.isfinite(umax):
        if (
            profile.soliton_class is SolitonClass.SHRINKING
            and abs(umax - 1.0) <= DECISION_BAND
            and end.phi_order == 1
        ):
            return Case.COMPACT_PROJECTIVE
        return Case.INCOMPLETE_AT_INFINITY
    if end.r_integral_diverges and end.t_integral_diverges:
        return Case.COMPLETE_NONCOMPACT
    if not end.r_integral_diverges:
        return Case.ILL_DEFINED
    return Case.INCOMPLETE_AT_INFINITY


def classify(
    spec: BundleSpec,
    E: float,
    umin: float | None = None,
    *,
    criticals: CriticalValues | None = None,
) -> CompletenessReport:
    """Completeness case for (spec, E), cross-checked against endpoint analysis.

    For the shrinking class, E within ``DECISION_BAND`` of E0 or E1 is
    evaluated at the critical value itself.
    """
    E = float(E)
    cls = spec.soliton_class
    notes: list[str] = []
    outside = False
    E_used = E
    if cls is SolitonClass.SHRINKING:
        if criticals is None:
            criticals = critical_values(spec)
        notes.extend(criticals.diagnostics)
        if abs(E - criticals.E0) <= DECISION_BAND:
            expected, E_used = Case.COMPLETE_NONCOMPACT, criticals.E0
        elif E > criticals.E0:
            expected = Case.ILL_DEFINED
        elif abs(E - criticals.E1) <= DECISION_BAND:
            expected, E_used = Case.COMPACT_PROJECTIVE, criticals.E1
        else:
            expected = Case.INCOMPLETE_AT_INFINITY
            if E <= 0:
                outside = True
                notes.append("E <= 0 for shrinking: not covered by the case analysis; treated as 'all other E'")
        if E_used != E:
            notes.append(f"E within {DECISION_BAND:g} of a critical value; evaluated at E = {E_used!r}")
    else:
        criticals = None
        if E < 0:
            expected = Case.COMPLETE_NONCOMPACT
        elif E > 0:
            expected = Case.ILL_DEFINED
        elif cls is SolitonClass.STEADY:
            expected = Case.COMPLETE_NONCOMPACT
            notes.append("Ricci-flat degenerate member (E = 0, V = 0)")
        else:
            expected = None
            outside = True
            notes.append("E = 0 expanding: classified by endpoint analysis only")

    profile = build_profile(spec, E_used, umin)
    notes.extend(profile.notes)
    umax = umax_of(profile)
    start = endpoint_analysis(profile, Location.AT_UMIN)
    if math.isfinite(umax):
        end = endpoint_analysis(profile, Location.AT_FINITE_UMAX, umax)
    else:
        end = endpoint_analysis(profile, Location.AT_INFINITY)
    derived = _derived_case(profile, umax, end)
    if expected is None:
        expected = derived
    if derived is not expected:
        raise ClassificationConflict(
            f"parameter rule gives {expected.value} but endpoint analysis gives {derived.value}"
            f" (E = {E_used!r}, Umax = {umax!r}, end = {end})"
        )
    if expected is Case.INCOMPLETE_AT_INFINITY and math.isfinite(umax):
        notes.append("finite Umax != 1: cannot be completed by adding a copy of the base at infinity")
    gt_ok = _gt_positive(spec, profile.umin, umax)
    if not gt_ok and expected is not Case.ILL_DEFINED:
        raise ClassificationConflict(f"g_t = g0 - U B is not positive on [{profile.umin}, {umax})")
    return CompletenessReport(
        case=expected,
        umax=umax,
        umin=profile.umin,
        E=E,
        E_used=E_used,
        umin_behavior=start,
        umax_behavior=end,
        gt_positive=gt_ok,
        outside_theory=outside,
        criticals=criticals,
        diagnostics=tuple(notes),
    )


@dataclass(frozen=True)
class SweepRow:
    E: float
    case: Case | None
    umax: float
    E0: float | None
    E1: float | None


def _threads() -> int:
    raw = os.environ.get("SOLITON_FORGE_THREADS")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def sweep(
    spec: BundleSpec,
    E_values,
    umin: float | None = None,
    *,
    include_criticals: bool = True,
) -> list[SweepRow]:
    """Classify every E in ``E_values``.

    For the shrinking class, E0 and E1 are inserted when they fall inside the
    swept range so the complete and compactifiable points show up.
    """
    Es = sorted(float(e) for e in E_values)
    crit = critical_values(spec) if spec.soliton_class is SolitonClass.SHRINKING else None
    if crit and include_criticals and len(Es) > 1:
        for c in (crit.E0, crit.E1):
            if Es[0] <= c <= Es[-1] and all(abs(c - e) > DECISION_BAND for e in Es):
                Es.append(c)
        Es.sort()

    def one(E):
        e0 = crit.E0 if crit else None
        e1 = crit.E1 if crit else None
        rep = classify(spec, E, umin, criticals=crit)
        return SweepRow(E, rep.case, rep.umax, e0, e1)

    n = _threads()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(one, Es))
    return [one(E) for E in Es]
