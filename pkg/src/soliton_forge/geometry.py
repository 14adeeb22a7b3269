"""Metric data along a fiber: arclength, radius, potential, curvature.

Conventions. U is the moment variable with dU = u dt and phi = u^2, so

    dt = dU / sqrt(phi),   d(log r) = dU / phi.

Ricci eigenvalues are those of the Ricci endomorphism in the complex (Hermitian)
normalisation; the real Ricci tensor carries each with multiplicity two. With
W = phi' + phi Q'/Q,

    fiber  = -W'/2,
    base_a = (eps + W lambda_a / 2) / (1 - U lambda_a),

where eps is the Einstein constant of the base metric entering the base
component (+1 for shrinking and steady; -1 by default for expanding).

The potential is normalised so that Ric + Hess f + rho g = 0, which gives
f = E (U - Umin) and |grad f|^2 = E^2 phi; then

    2 * scalar_c + E^2 phi + 2 rho E (U - Umin)

is constant along the fiber.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .classify import umax_of
from .errors import AtOrBelowUmin, BelowUmin, PositivityViolation, QuadratureFailure
from .model import BundleSpec, SolitonClass
from .profile import SolitonProfile, ode_residual, overflow_cap, phi, phi_offset, w_prime, w_value

QUAD_RTOL = 1e-12
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)
ACCEPT_RTOL = 1e-10
_GL_NODES, _GL_WEIGHTS = leggauss(16)
_GRID_SEGMENTS = 512

DEFAULT_EINSTEIN_SIGN = {
    SolitonClass.SHRINKING: 1.0,
    SolitonClass.STEADY: 1.0,
    SolitonClass.EXPANDING: -1.0,
}


def einstein_sign(profile: SolitonProfile, override: float | None = None) -> float:
    if override is not None:
        return float(override)
    return DEFAULT_EINSTEIN_SIGN[profile.soliton_class]


def _check_U(profile: SolitonProfile, U: float) -> float:
    U = float(U)
    if U < profile.umin:
        raise BelowUmin(f"U = {U!r} below Umin = {profile.umin!r}")
    return U


def _quad(f, a, b, what):
    with warnings.catch_warnings():
        # accuracy is judged from the returned error estimate below
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=QUAD_RTOL, limit=400)
    if not math.isfinite(val) or err > ACCEPT_RTOL * max(abs(val), 1e-300) and err > 1e-14:
        raise QuadratureFailure(f"{what}: value {val!r}, error estimate {err!r}")
    return val


ZERO_END = 1e-9


def _end_correction(profile: SolitonProfile, U_end: float) -> float:
    """phi(U_end) if U_end is a numerically located zero of phi, else 0.

    Subtracting phi(U_end) * (x - Umin)/(U_end - Umin) moves the zero exactly to
    U_end; the change is at round-off level but removes a kink in 1/sqrt(phi).
    """
    h = U_end - profile.umin
    if h <= 0.0:
        return 0.0
    v = phi(profile, U_end)
    # near Umin phi is small only because h is
    return v if abs(v) <= ZERO_END * min(1.0, h) else 0.0


def _phi_to_end(profile, x, U_end, corr, h=None):
    v = phi(profile, x) if h is None else phi_offset(profile, h)
    if corr:
        v = v - corr * (x - profile.umin) / (U_end - profile.umin)
    return v


def _sqrt_phi(profile, x, U_end, corr, h=None):
    v = _phi_to_end(profile, x, U_end, corr, h)
    if v < 0:
        raise PositivityViolation(f"phi({x!r}) = {v!r} < 0: beyond the end of the working range")
    return math.sqrt(v)


def arclength_t(profile: SolitonProfile, U: float) -> float:
    """Fiber arclength from the zero section, t(U) = int_Umin^U dx / sqrt(phi).

    The interval is split in half and each half substituted x = end -+ s^2,
    which removes the square-root singularity at Umin and at a zero of phi at U.
    """
    U = _check_U(profile, U)
    h = U - profile.umin
    if h == 0.0:
        return 0.0
    a = math.sqrt(0.5 * h)
    um = profile.umin
    corr = _end_correction(profile, U)
    # phi is evaluated from the offset h, since um + h can round h away
    lower = _quad(
        lambda s: 2.0 * s / _sqrt_phi(profile, um + s * s, U, corr, s * s), 0.0, a, "arclength (lower half)"
    )
    upper = _quad(
        lambda s: 2.0 * s / _sqrt_phi(profile, U - s * s, U, corr, h - s * s), 0.0, a, "arclength (upper half)"
    )
    return lower + upper


def _inv_phi_integral(profile: SolitonProfile, a: float, b: float, umax: float) -> float:
    """int_a^b dx/phi for Umin < a <= b, log-substituted toward the nearer zero of phi."""
    um = profile.umin
    if math.isfinite(umax):
        mid = 0.5 * (um + umax)
        if a < mid < b:
            return _inv_phi_integral(profile, a, mid, umax) + _inv_phi_integral(profile, mid, b, umax)
        if a >= mid:
            # x = umax - e^y
            lo, hi = math.log(umax - b), math.log(umax - a)
            return _quad(lambda y: math.exp(y) / phi(profile, umax - math.exp(y)), lo, hi, "log r")
    lo, hi = math.log(a - um), math.log(b - um)
    return _quad(lambda y: math.exp(y) / phi_offset(profile, math.exp(y)), lo, hi, "log r")


def default_u_ref(profile: SolitonProfile, umax: float = math.inf) -> float:
    ref = profile.umin + 1.0
    if math.isfinite(umax):
        ref = min(ref, 0.5 * (profile.umin + umax))
    return ref


def log_radius(
    profile: SolitonProfile, U: float, U_ref: float | None = None, umax: float = math.inf
) -> float:
    """log r(U) = int_{U_ref}^U dx/phi; -inf at Umin and +inf at a finite Umax."""
    U = float(U)
    if U_ref is None:
        U_ref = default_u_ref(profile, umax)
    if U_ref <= profile.umin:
        raise AtOrBelowUmin(f"U_ref must exceed Umin = {profile.umin!r}")
    if U == profile.umin:
        return -math.inf
    if U < profile.umin:
        raise AtOrBelowUmin(f"r is only defined above Umin = {profile.umin!r} (r -> 0 there)")
    if math.isfinite(umax) and U >= umax:
        return math.inf
    if U == U_ref:
        return 0.0
    if U > U_ref:
        return _inv_phi_integral(profile, U_ref, U, umax)
    return -_inv_phi_integral(profile, U, U_ref, umax)


def radius_r(
    profile: SolitonProfile, U: float, U_ref: float | None = None, umax: float = math.inf
) -> float:
    """Bundle norm r(U) = exp(int_{U_ref}^U dx/phi), so r(U_ref) = 1 and r -> 0 at Umin.

    Returns inf once log r leaves the float range.
    """
    if float(U) <= profile.umin:
        raise AtOrBelowUmin(f"r is only defined above Umin = {profile.umin!r} (r -> 0 there)")
    lr = log_radius(profile, U, U_ref, umax)
    return math.exp(lr) if lr < _LOG_FLOAT_MAX else math.inf


def potential_f(profile: SolitonProfile, U: float) -> float:
    """Soliton potential, linear in U and zero on the zero section."""
    U = _check_U(profile, U)
    return profile.E * (U - profile.umin)


def metric_eigenvalues(profile: SolitonProfile, U: float):
    """(fiber, base): fiber component 2 phi, base eigenvalues 1 - U lambda relative to g0."""
    U = _check_U(profile, U)
    fiber = 2.0 * phi(profile, U)
    base = [1.0 - U * lam for lam in profile.spec.lambdas]
    if fiber < 0 or any(b <= 0 for b in base):
        raise PositivityViolation(f"metric degenerates at U = {U!r}: fiber {fiber!r}, base {base!r}")
    return fiber, base


def ricci_eigenvalues(profile: SolitonProfile, U: float, eps: float | None = None):
    """(fiber, base) Ricci endomorphism eigenvalues at U."""
    U = _check_U(profile, U)
    e = einstein_sign(profile, eps)
    W = w_value(profile, U)
    fiber = -0.5 * w_prime(profile, U)
    base = [(e + 0.5 * W * lam) / (1.0 - U * lam) for lam in profile.spec.lambdas]
    return fiber, base


def scalar_complex_trace(profile: SolitonProfile, U: float, eps: float | None = None) -> float:
    fiber, base = ricci_eigenvalues(profile, U, eps)
    return fiber + sum(base)


def _identity_bracket(profile: SolitonProfile, U: float, eps: float | None) -> float:
    h = U - profile.umin
    return (
        2.0 * scalar_complex_trace(profile, U, eps)
        + profile.E**2 * phi(profile, U)
        + 2.0 * profile.spec.rho * profile.E * h
    )


def identity_constant(profile: SolitonProfile, eps: float | None = None) -> float:
    """Value of 2 S_c + |grad f|^2 + 2 rho f on the zero section."""
    return _identity_bracket(profile, profile.umin, eps)


def soliton_identity_residual(profile: SolitonProfile, U: float, eps: float | None = None) -> float:
    U = _check_U(profile, U)
    return _identity_bracket(profile, U, eps) - identity_constant(profile, eps)


# --- arclength-uniform sampling -------------------------------------------


def _sin2_map(umin, L, theta):
    return umin + L * np.sin(0.5 * np.pi * theta) ** 2


def _t_density(profile, umin, L, theta, corr=0.0):
    U = _sin2_map(umin, L, theta)
    dU = 0.5 * L * np.pi * np.sin(np.pi * theta)
    ph = np.asarray(_phi_to_end(profile, U, umin + L, corr))
    if np.any(ph < 0):
        raise PositivityViolation("phi < 0 inside the sampling range")
    return dU / np.sqrt(ph)


def resolve_cap(profile: SolitonProfile, u_cap: float | None, umax: float) -> float:
    cap = min(umax, profile.umin + 50.0) if u_cap is None else float(u_cap)
    if not cap > profile.umin:
        raise BelowUmin(f"u_cap = {cap!r} must exceed Umin = {profile.umin!r}")
    if cap > umax:
        raise PositivityViolation(f"u_cap = {cap!r} lies beyond Umax = {umax!r}")
    if cap > overflow_cap(profile):
        cap = overflow_cap(profile)
    return cap


def _invert_segments(profile, umin, L, corr, edges, T, seg, k, targets):
    """theta in [edges[k], edges[k+1]] with t(theta) = target, for all targets at once.

    Newton on the 16-point partial integral, falling back to bisection whenever
    a step leaves the current bracket.
    """
    lo, hi = edges[k].copy(), edges[k + 1].copy()
    frac = np.clip((targets - T[k]) / np.where(seg[k] > 0, seg[k], 1.0), 0.01, 0.99)
    x = lo + frac * (hi - lo)
    a = edges[k]
    for _ in range(100):
        nodes = 0.5 * (x - a)[:, None] * _GL_NODES + 0.5 * (x + a)[:, None]
        part = 0.5 * (x - a) * (_t_density(profile, umin, L, nodes.ravel(), corr).reshape(nodes.shape) @ _GL_WEIGHTS)
        f = T[k] + part - targets
        lo = np.where(f < 0, x, lo)
        hi = np.where(f > 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / _t_density(profile, umin, L, x, corr)
        nxt = x - step
        bad = ~np.isfinite(nxt) | (nxt <= lo) | (nxt >= hi)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = (np.abs(nxt - x) <= 1e-15) | (f == 0) | (hi - lo <= 1e-15)
        x = np.where(f == 0, x, nxt)
        if np.all(done):
            return x
    raise QuadratureFailure("arclength grid: theta inversion did not converge")


def arclength_grid(profile: SolitonProfile, n_samples: int, u_cap: float):
    """U values (with Umin first) equally spaced in arclength up to ``u_cap``; returns (U, t)."""
    umin = profile.umin
    L = u_cap - umin
    corr = _end_correction(profile, u_cap)
    edges = np.linspace(0.0, 1.0, _GRID_SEGMENTS + 1)
    half = 0.5 * (edges[1] - edges[0])
    nodes = (half * _GL_NODES + 0.5 * (edges[:-1] + edges[1:])[:, None]).ravel()
    dens = _t_density(profile, umin, L, nodes, corr).reshape(_GRID_SEGMENTS, -1)
    seg = half * (dens @ _GL_WEIGHTS)
    T = np.concatenate([[0.0], np.cumsum(seg)])
    targets = T[-1] * np.arange(1, n_samples + 1) / n_samples
    k = np.clip(np.searchsorted(T, targets[:-1]) - 1, 0, _GRID_SEGMENTS - 1)
    thetas = np.append(_invert_segments(profile, umin, L, corr, edges, T, seg, k, targets[:-1]), 1.0)
    U = np.concatenate([[umin], _sin2_map(umin, L, thetas)])
    U[-1] = u_cap
    t = np.concatenate([[0.0], targets])
    return U, t


@dataclass(frozen=True)
class GeometrySample:
    U: float
    phi: float
    t: float
    r: float
    f: float
    ric_fiber: float
    ric_base: tuple[float, ...]
    scalar_c: float
    identity_residual: float
    ode_residual: float


@dataclass(frozen=True)
class GeometryTable:
    spec: BundleSpec
    E: float
    umin: float
    umax: float
    u_cap: float
    u_ref: float
    einstein_sign: float
    identity_constant: float
    rows: tuple[GeometrySample, ...] = field(default=())

    def columns(self) -> list[str]:
        m = self.spec.base_dim
        return (
            ["U", "phi", "t", "r", "f", "ric_fiber"]
            + [f"ric_base_{i + 1}" for i in range(m)]
            + ["scalar_c", "identity_residual", "ode_residual"]
        )

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                [s.U, s.phi, s.t, s.r, s.f, s.ric_fiber, *s.ric_base, s.scalar_c, s.identity_residual, s.ode_residual]
                for s in self.rows
            ]
        )

    def column(self, name: str) -> np.ndarray:
        return self.as_array()[:, self.columns().index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns())
        for row in self.as_array():
            w.writerow([_fmt(x) for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "E": self.E,
            "umin": self.umin,
            "umax": self.umax if math.isfinite(self.umax) else "inf",
            "u_cap": self.u_cap,
            "u_ref": self.u_ref,
            "einstein_sign": self.einstein_sign,
            "identity_constant": self.identity_constant,
            "columns": self.columns(),
            "rows": [[_json_num(x) for x in row] for row in self.as_array()],
        }


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")  # + 0.0 drops the sign of zero


def _json_num(x: float):
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")


def read_csv_table(text: str) -> tuple[list[str], np.ndarray]:
    """Parse a CSV emitted by :meth:`GeometryTable.to_csv` into (header, float array)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    data = np.array([[float(x) for x in row] for row in reader if row])
    return header, data


def sample_geometry(
    profile: SolitonProfile,
    n_samples: int = 200,
    u_cap: float | None = None,
    *,
    umax: float | None = None,
    eps: float | None = None,
) -> GeometryTable:
    """Rows at Umin and at ``n_samples`` arclength-uniform points up to the cap.

    The cap defaults to min(Umax, Umin + 50).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if umax is None:
        umax = umax_of(profile)
    cap = resolve_cap(profile, u_cap, umax)
    e = einstein_sign(profile, eps)
    U_ref = default_u_ref(profile, umax)
    Us, ts = arclength_grid(profile, n_samples, cap)
    const = identity_constant(profile, e)
    rows = []
    for U, t in zip(Us, ts):
        U = float(U)
        fiber, base = ricci_eigenvalues(profile, U, e)
        r = 0.0 if U == profile.umin else radius_r(profile, U, U_ref, umax)
        rows.append(
            GeometrySample(
                U=U,
                phi=phi(profile, U),
                t=float(t),
                r=r,
                f=potential_f(profile, U),
                ric_fiber=fiber,
                ric_base=tuple(base),
                scalar_c=fiber + sum(base),
                identity_residual=_identity_bracket(profile, U, e) - const,
                ode_residual=ode_residual(profile, U),
            )
        )
    return GeometryTable(
        spec=profile.spec,
        E=profile.E,
        umin=profile.umin,
        umax=umax,
        u_cap=cap,
        u_ref=U_ref,
        einstein_sign=e,
        identity_constant=const,
        rows=tuple(rows),
    )
