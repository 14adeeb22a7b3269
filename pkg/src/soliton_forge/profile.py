"""Closed-form momentum profile phi(U) for the three soliton classes.

Along a fiber the soliton equation reduces to the linear first-order ODE

    phi' + phi * Q'/Q = E * phi + s(U)

with source s(U) = -2U (shrinking), +2U (expanding) or 2 (steady). Writing
N = phi * Q, this is N' = E*N + s*Q, so with sigma the exponential-weighted
antiderivative of s*Q,

    N(U) = exp(E*(U - Umin)) * sigma(Umin) - sigma(U).

Everything here is evaluated from the pair (sigma, sigma(Umin)); nothing is
integrated numerically. For evaluation N is split, in h = U - Umin, as

    N(h) = c * R_D(E h) + n(h),    R_D(x) = exp(x) - sum_{k<=D} x^k / k!,

with c = sigma(Umin) and n the degree-D Taylor polynomial of N at Umin. Both
pieces are small near the zero section, so phi keeps full relative accuracy
there even when sigma has large coefficients or Q(Umin) is tiny.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import BelowUmin, InvalidUmin, RangeOverflow
from .model import BundleSpec, SolitonClass
from .poly import (
    SMALL_EXPONENT,
    Polynomial,
    exp_weighted_antiderivative,
    poly_antiderivative,
    poly_derivative,
    q_from_eigenvalues,
)

EXP_LIMIT = 700.0
DROP_TOL = 1e-10
# R_D(x) is summed as a series for x in [-(D + 1), 0], where its terms shrink
# from the first; above that it is exp(x) times the regularized lower incomplete
# gamma function P(D + 1, x)


class SourceKind(enum.Enum):
    SHRINKING = "-2U"
    EXPANDING = "+2U"
    STEADY = "+2"

    @property
    def polynomial(self) -> Polynomial:
        return {
            SourceKind.SHRINKING: Polynomial((0.0, -2.0)),
            SourceKind.EXPANDING: Polynomial((0.0, 2.0)),
            SourceKind.STEADY: Polynomial((2.0,)),
        }[self]


_SOURCE = {
    SolitonClass.SHRINKING: SourceKind.SHRINKING,
    SolitonClass.EXPANDING: SourceKind.EXPANDING,
    SolitonClass.STEADY: SourceKind.STEADY,
}

# zero-section location forced by smooth closing-up (steady leaves it free)
_FIXED_UMIN = {SolitonClass.SHRINKING: -1.0, SolitonClass.EXPANDING: 1.0}


@dataclass(frozen=True)
class SolitonProfile:
    spec: BundleSpec
    E: float
    umin: float
    Q: Polynomial
    sigma: Polynomial
    source_kind: SourceKind
    drop_exponential: bool = False
    sigma_at_umin: float = field(init=False)
    notes: tuple[str, ...] = field(init=False, default=())
    # h = U - Umin representation: N(h) = exp_coeff * expm1(E h) + poly_part(h)
    _exp_coeff: float = field(init=False, repr=False)
    _poly_part: Polynomial = field(init=False, repr=False)
    _taylor: Polynomial = field(init=False, repr=False)
    _taylor_deg: int = field(init=False, repr=False)
    _q_shifted: Polynomial = field(init=False, repr=False)

    def __post_init__(self):
        set_ = object.__setattr__
        notes = []
        shifted = self.sigma.shifted(self.umin)
        b0 = shifted.coeffs[0] if shifted.coeffs else 0.0
        set_(self, "sigma_at_umin", float(b0))
        if self.E == 0.0:
            # sigma holds the plain antiderivative A; N = A(U) - A(Umin)
            set_(self, "_exp_coeff", 0.0)
            set_(self, "_poly_part", shifted - Polynomial((b0,)))
            if self.spec.soliton_class is SolitonClass.STEADY:
                notes.append("E = 0: Ricci-flat degenerate member (V = 0)")
        else:
            set_(self, "_exp_coeff", 0.0 if self.drop_exponential else float(b0))
            set_(self, "_poly_part", Polynomial((b0,)) - shifted)
            if self.drop_exponential:
                notes.append(
                    f"exponential term dropped: |sigma(Umin)| = {abs(b0):.3g} below"
                    f" {DROP_TOL:g} x coefficient scale"
                )
            if abs(self.E) < SMALL_EXPONENT:
                notes.append(f"|E| < {SMALL_EXPONENT}: closed form loses digits to cancellation")
        set_(self, "notes", tuple(notes))
        taylor = _taylor_part(self.source * self.Q, self.umin, self.E)
        set_(self, "_taylor", taylor[0])
        set_(self, "_taylor_deg", taylor[1])
        set_(self, "_q_shifted", self.Q.shifted(self.umin))

    @property
    def source(self) -> Polynomial:
        return self.source_kind.polynomial

    @property
    def has_exponential(self) -> bool:
        return self._exp_coeff != 0.0

    @property
    def exp_coeff(self) -> float:
        """Coefficient c of the exponential part c*exp(E*(U - Umin)) of N = phi*Q."""
        return self._exp_coeff

    @property
    def poly_part(self) -> Polynomial:
        """Polynomial part of N in the shifted variable h = U - Umin (up to the -c constant)."""
        return self._poly_part

    @property
    def soliton_class(self) -> SolitonClass:
        return self.spec.soliton_class


def build_profile(
    spec: BundleSpec,
    E: float,
    umin: float | None = None,
    *,
    drop_tol: float = DROP_TOL,
) -> SolitonProfile:
    """Closed-form profile for a validated spec and soliton parameter E.

    Shrinking and expanding fix Umin at -1 and +1; steady needs ``umin > -1``.
    If ``|sigma(Umin)|`` is below ``drop_tol`` times the largest coefficient of
    sigma and E > 0, the exponential term is treated as absent (this is what
    happens at the critical value E0, where it vanishes exactly).
    """
    cls = spec.soliton_class
    E = float(E)
    if cls is SolitonClass.STEADY:
        if umin is None:
            raise InvalidUmin("steady profiles need an explicit umin > -1")
        umin = float(umin)
        if not umin > -1.0:
            raise InvalidUmin(f"steady profiles need umin > -1, got {umin!r}")
    else:
        required = _FIXED_UMIN[cls]
        if umin is not None and float(umin) != required:
            raise InvalidUmin(f"{cls.value} profiles have Umin = {required:g}, got {umin!r}")
        umin = required

    Q = q_from_eigenvalues(spec.lambdas)
    kind = _SOURCE[cls]
    S = kind.polynomial * Q
    if E == 0.0:
        sigma = poly_antiderivative(S)
        drop = False
    else:
        sigma = exp_weighted_antiderivative(S, E)
        b0 = sigma(umin)
        drop = E > 0 and abs(b0) <= drop_tol * sigma.max_abs_coeff()
    return SolitonProfile(spec, E, umin, Q, sigma, kind, drop_exponential=drop)


def _taylor_part(S: Polynomial, umin: float, E: float) -> tuple[Polynomial, int]:
    """Taylor coefficients n_0..n_D of N at Umin, with D = deg S + 2.

    From N' = E N + S and N(Umin) = 0: (k+1) n_{k+1} = E n_k + S_k.
    """
    Sh = S.shifted(umin).coeffs
    D = max(len(Sh) - 1, 0) + 2
    n = [0.0]
    for k in range(D):
        sk = Sh[k] if k < len(Sh) else 0.0
        n.append((E * n[k] + sk) / (k + 1))
    return Polynomial(n), D


def _series_terms(m: float, D: int) -> int:
    # terms after the first shrink by at most m/(D+1+j); stop once below 1e-17
    ratio, K = 1.0, 0
    while ratio > 1e-17 and K < 200:
        K += 1
        ratio *= m / (D + 1 + K)
    return K


def _tail_series(x, D: int, K: int):
    acc = 1.0
    for j in range(K, 0, -1):
        acc = 1.0 + acc * x / (D + 1 + j)
    return acc * x ** (D + 1) / math.factorial(D + 1)


def _tail_direct(x, D: int, exp):
    head = 0.0
    for k in range(D, -1, -1):
        head = head * x + 1.0 / math.factorial(k)
    return exp(x) - head


def exp_tail(x, D: int):
    """R_D(x) = exp(x) - sum_{k=0}^{D} x^k / k!, elementwise, without cancellation near 0."""
    lo = -float(max(D + 1, 1))
    if np.ndim(x) == 0:
        x = float(x)
        if x > 0.0:
            return math.exp(x) * float(special.gammainc(D + 1, x))
        if x >= lo:
            return _tail_series(x, D, _series_terms(-x, D))
        return _tail_direct(x, D, math.exp)
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x > 0.0
    if np.any(pos):
        xp = x[pos]
        out[pos] = np.exp(xp) * special.gammainc(D + 1, xp)
    series = (x >= lo) & ~pos
    if np.any(series):
        xs = x[series]
        out[series] = _tail_series(xs, D, _series_terms(float(np.max(-xs)), D))
    rest = x < lo
    if np.any(rest):
        out[rest] = _tail_direct(x[rest], D, np.exp)
    return out


def _offset(profile: SolitonProfile, U):
    scalar = np.ndim(U) == 0
    U = float(U) if scalar else np.asarray(U, dtype=float)
    below = U < profile.umin if scalar else np.any(U < profile.umin)
    if below:
        raise BelowUmin(f"U below Umin = {profile.umin!r}")
    h = U - profile.umin
    if profile.has_exponential:
        top = profile.E * h if scalar else np.max(profile.E * h, initial=-math.inf)
        if top > EXP_LIMIT:
            raise RangeOverflow(
                f"E*(U - Umin) exceeds {EXP_LIMIT:g}",
                {"E": profile.E, "umin": profile.umin, "U_max_allowed": profile.umin + EXP_LIMIT / profile.E},
            )
    return U, h


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def numerator(profile: SolitonProfile, U, order: int = 0):
    """k-th U-derivative of N = phi * Q for k in {0, 1, 2}."""
    _, h = _offset(profile, U)
    return _numerator_h(profile, h, order)


def _numerator_h(profile, h, order=0):
    c, E = profile.exp_coeff, profile.E
    if c == 0.0:
        P = profile.poly_part
        for _ in range(order):
            P = poly_derivative(P)
        return P(h)
    n, D = profile._taylor, profile._taylor_deg
    for _ in range(order):
        n = poly_derivative(n)
    return c * E**order * exp_tail(E * h, D - order) + n(h)


def phi_offset(profile: SolitonProfile, h):
    """phi(Umin + h) evaluated from h itself, so tiny offsets are not rounded away."""
    h = float(h) if np.ndim(h) == 0 else np.asarray(h, dtype=float)
    if np.any(np.asarray(h) < 0):
        raise BelowUmin("negative offset from Umin")
    _offset(profile, profile.umin + h)
    return _out(_numerator_h(profile, h) / profile._q_shifted(h))


def phi(profile: SolitonProfile, U):
    """Squared length of the fiber generator; zero at Umin."""
    U, _ = _offset(profile, U)
    return _out(numerator(profile, U) / profile.Q(U))


def phi_prime(profile: SolitonProfile, U):
    """dphi/dU from the reduced ODE: E*phi - phi*Q'/Q + s(U)."""
    U, _ = _offset(profile, U)
    f = numerator(profile, U) / profile.Q(U)
    q, dq = profile.Q(U), poly_derivative(profile.Q)(U)
    return _out(profile.E * f - f * dq / q + profile.source(U))


def phi_prime_closed_form(profile: SolitonProfile, U):
    """dphi/dU by differentiating N/Q directly (independent of the ODE)."""
    U, _ = _offset(profile, U)
    q, dq = profile.Q(U), poly_derivative(profile.Q)(U)
    n, dn = numerator(profile, U), numerator(profile, U, 1)
    return _out(dn / q - n * dq / q**2)


def w_value(profile: SolitonProfile, U):
    """W = phi' + phi*Q'/Q = N'/Q, the U-form of u d/dt log(u^2 p)."""
    U, _ = _offset(profile, U)
    return _out(numerator(profile, U, 1) / profile.Q(U))


def w_prime(profile: SolitonProfile, U):
    """dW/dU = N''/Q - N' Q'/Q^2."""
    U, _ = _offset(profile, U)
    q, dq = profile.Q(U), poly_derivative(profile.Q)(U)
    return _out(numerator(profile, U, 2) / q - numerator(profile, U, 1) * dq / q**2)


def ode_residual(profile: SolitonProfile, U):
    """Closed-form phi' + phi Q'/Q - s - E phi; zero for an exact solution."""
    U, _ = _offset(profile, U)
    q, dq = profile.Q(U), poly_derivative(profile.Q)(U)
    f = numerator(profile, U) / q
    return _out(phi_prime_closed_form(profile, U) + f * dq / q - profile.source(U) - profile.E * f)


def residual_scale(profile: SolitonProfile, U):
    """Normalisation 1 + |E phi| + |s(U)| used for residual tolerances."""
    U, _ = _offset(profile, U)
    return _out(1.0 + np.abs(profile.E * np.asarray(phi(profile, U))) + np.abs(profile.source(U)))


def describe(profile: SolitonProfile) -> dict:
    return {
        **profile.spec.to_dict(),
        "E": profile.E,
        "umin": profile.umin,
        "sigma": list(profile.sigma.coeffs),
        "sigma_at_umin": profile.sigma_at_umin,
        "exponential_dropped": profile.drop_exponential,
        "notes": list(profile.notes),
    }


def overflow_cap(profile: SolitonProfile) -> float:
    """Largest U the evaluators accept (inf when no growing exponential is present)."""
    if profile.has_exponential and profile.E > 0:
        # shaved so that umin + cap - umin stays under the guard after rounding
        return profile.umin + EXP_LIMIT / profile.E * (1.0 - 1e-12)
    return math.inf
