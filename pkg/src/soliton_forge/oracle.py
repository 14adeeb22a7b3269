"""Brute-force cross-checks that share no code path with the closed forms.

* ``quad_phi_oracle`` integrates the defining integral numerically;
* ``ode_phi_oracle`` integrates the reduced ODE from the zero section;
* ``fd_ricci_oracle`` differentiates log(u^2 p) numerically in arclength;
* ``root_scan_oracle`` lists sign changes on a uniform grid.

None of these touch the sigma polynomial or the analytic W'.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import GridTooClose, QuadratureFailure, StepFailure
from .model import BundleSpec, SolitonClass
from .profile import SolitonProfile, phi

_SOURCE = {
    SolitonClass.SHRINKING: lambda x: -2.0 * x,
    SolitonClass.EXPANDING: lambda x: 2.0 * x,
    SolitonClass.STEADY: lambda x: 2.0,
}


def _q(lambdas: Sequence[float], x: float) -> float:
    return math.prod(1.0 - x * lam for lam in lambdas)


def _dlogq(lambdas: Sequence[float], x: float) -> float:
    return sum(-lam / (1.0 - x * lam) for lam in lambdas)


def quad_phi_oracle(spec: BundleSpec, E: float, umin: float, U: float) -> float:
    """phi(U) = exp(E U)/Q(U) * int_umin^U exp(-E x) s(x) Q(x) dx by adaptive quadrature."""
    if U == umin:
        return 0.0
    s = _SOURCE[spec.soliton_class]
    lam = spec.lambdas

    def integrand(x):
        return math.exp(E * (U - x)) * s(x) * _q(lam, x)

    with warnings.catch_warnings():
        # the error estimate is checked below
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(integrand, umin, U, epsabs=0.0, epsrel=1e-12, limit=400)
    if err > 1e-10 * abs(val) and err > 1e-15:
        raise QuadratureFailure(f"quadrature error estimate {err!r} for value {val!r}")
    return val / _q(lam, U)


def ode_phi_oracle(profile: SolitonProfile, U: float, start_offset: float = 1e-8) -> float:
    """phi(U) by integrating phi' = E phi - phi Q'/Q + s(U) from just above Umin.

    Starts from the linearisation phi(Umin + d) = 2 d and uses an explicit
    8th-order Runge-Kutta scheme (DOP853) at tight tolerances.
    """
    um = profile.umin
    if U <= um + start_offset:
        return 2.0 * (U - um)
    s = _SOURCE[profile.soliton_class]
    lam = profile.spec.lambdas
    E = profile.E

    def rhs(x, y):
        return [E * y[0] - y[0] * _dlogq(lam, x) + s(x)]

    sol = integrate.solve_ivp(
        rhs, (um + start_offset, U), [2.0 * start_offset], method="DOP853", rtol=1e-13, atol=1e-15
    )
    if not sol.success:
        raise StepFailure(sol.message)
    return float(sol.y[0, -1])


def _t_from(profile: SolitonProfile, U0: float, U: float) -> float:
    """int_U0^U dx / sqrt(phi) for U0, U away from zeros of phi."""
    val, _ = integrate.quad(lambda x: 1.0 / math.sqrt(phi(profile, x)), U0, U, epsabs=0.0, epsrel=1e-13)
    return val


def _U_at_offset(profile: SolitonProfile, U0: float, dt: float) -> float:
    """Solve t(U) - t(U0) = dt by Newton iteration with dt/dU = 1/sqrt(phi)."""
    U = U0 + dt * math.sqrt(phi(profile, U0))
    for _ in range(30):
        step = (_t_from(profile, U0, U) - dt) * math.sqrt(phi(profile, U))
        U -= step
        if abs(step) <= 4e-16 * max(1.0, abs(U)):
            break
    return U


def _arclength_from_umin(profile: SolitonProfile, U: float) -> float:
    a = math.sqrt(U - profile.umin)
    val, _ = integrate.quad(lambda s: 2.0 * s / math.sqrt(phi(profile, profile.umin + s * s)), 0.0, a)
    return val


def fd_ricci_oracle(profile: SolitonProfile, U: float, h_t: float = 1e-3, eps: float | None = None):
    """Ricci eigenvalues from finite differences of log(u^2 p) in arclength.

    Builds the grid t(U) + j*h_t, j = -2..2, evaluates L = log(phi Q), u and the
    per-direction data there, and uses five-point stencils (fourth order) for
    u d/dt(u dL/dt). Base direction a uses eps + (1/2) (u dL/dt) lambda_a.
    """
    if not 1e-5 <= h_t <= 1e-2:
        raise ValueError("h_t must lie in [1e-5, 1e-2]")
    if _arclength_from_umin(profile, U) < 3.0 * h_t:
        raise GridTooClose(f"U = {U!r} is within 3*h_t of the zero section in arclength")
    if eps is None:
        eps = -1.0 if profile.soliton_class is SolitonClass.EXPANDING else 1.0
    lam = profile.spec.lambdas
    Us = [_U_at_offset(profile, U, j * h_t) if j else U for j in (-2, -1, 0, 1, 2)]
    L = np.array([math.log(phi(profile, x) * _q(lam, x)) for x in Us])
    u = np.array([math.sqrt(phi(profile, x)) for x in Us])
    d1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h_t)
    d2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h_t**2)
    Lp, Lpp, up = d1 @ L, d2 @ L, d1 @ u
    u0 = u[2]
    R00 = -u0 * (up * Lp + u0 * Lpp)
    fiber = R00 / (2.0 * u0**2)
    F = u0 * Lp
    base = [(eps + 0.5 * F * a) / (1.0 - U * a) for a in lam]
    return float(fiber), base


def root_scan_oracle(fn: Callable[[float], float], lo: float, hi: float, n: int) -> list[tuple[float, float]]:
    """Sign-change subintervals of an n-point uniform grid on [lo, hi]."""
    if not lo < hi or n < 2:
        raise ValueError("need lo < hi and n >= 2")
    xs = np.linspace(lo, hi, n)
    ys = [fn(float(x)) for x in xs]
    out = []
    for i in range(n - 1):
        a, b = ys[i], ys[i + 1]
        if a == 0 or math.isnan(a) or math.isnan(b):
            continue
        if b == 0 or (a > 0) != (b > 0):
            out.append((float(xs[i]), float(xs[i + 1])))
    return out
