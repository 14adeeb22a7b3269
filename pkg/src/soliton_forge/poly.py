"""Dense real polynomials and the exponential-weighted antiderivative.

Coefficients are stored in ascending order, ``coeffs[k]`` multiplies ``U**k``.
The zero polynomial is the empty tuple.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateExponent

SMALL_EXPONENT = 0.1


class SmallExponentWarning(RuntimeWarning):
    """Raised (as a warning) when |E| is small enough that the recurrence loses digits."""


def _trim(coeffs: Iterable[float]) -> tuple[float, ...]:
    c = [float(x) for x in coeffs]
    while c and c[-1] == 0.0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        return poly_eval(self, x)

    def __add__(self, other: Polynomial) -> Polynomial:
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Polynomial(
            (a[k] if k < len(a) else 0.0) + (b[k] if k < len(b) else 0.0) for k in range(n)
        )

    def __neg__(self) -> Polynomial:
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return poly_mul(self, other)
        return Polynomial(c * float(other) for c in self.coeffs)

    __rmul__ = __mul__

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def shifted(self, x0: float) -> Polynomial:
        """Coefficients of ``h -> p(x0 + h)``."""
        return poly_shift(self, x0)


def poly_eval(p: Polynomial, x):
    """Horner evaluation; works elementwise on numpy arrays."""
    if not p.coeffs:
        return 0.0 * x if isinstance(x, np.ndarray) else 0.0
    acc = p.coeffs[-1] + 0.0 * x
    for c in reversed(p.coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_derivative(p: Polynomial) -> Polynomial:
    return Polynomial(k * c for k, c in enumerate(p.coeffs) if k > 0)


def poly_antiderivative(s: Polynomial) -> Polynomial:
    """Antiderivative vanishing at 0."""
    if not s.coeffs:
        return Polynomial()
    return Polynomial((0.0, *(c / (k + 1) for k, c in enumerate(s.coeffs))))


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    if not a.coeffs or not b.coeffs:
        return Polynomial()
    return Polynomial(np.convolve(a.coeffs, b.coeffs))


def poly_shift(p: Polynomial, x0: float) -> Polynomial:
    # repeated synthetic division gives the Taylor coefficients at x0
    c = list(p.coeffs)
    n = len(c)
    for i in range(n):
        for k in range(n - 2, i - 1, -1):
            c[k] += x0 * c[k + 1]
    return Polynomial(c)


def q_from_eigenvalues(lambdas: Sequence[float]) -> Polynomial:
    """Relative volume factor prod_i (1 - U * lambda_i)."""
    q = Polynomial((1.0,))
    for lam in lambdas:
        q = poly_mul(q, Polynomial((1.0, -float(lam))))
    return q


def exp_weighted_antiderivative(s: Polynomial, E: float) -> Polynomial:
    """Polynomial ``sigma`` with ``E*sigma - sigma' = s``.

    Equivalently ``d/dx[-exp(-E x) sigma(x)] = exp(-E x) s(x)``, so
    ``int_a^b exp(-E x) s(x) dx = exp(-E a) sigma(a) - exp(-E b) sigma(b)``.
    Solved top-down; the degree of ``sigma`` equals the degree of ``s``.
    """
    if E == 0:
        raise DegenerateExponent("E = 0: use poly_antiderivative instead")
    if abs(E) < SMALL_EXPONENT:
        warnings.warn(
            f"|E| = {abs(E):g} < {SMALL_EXPONENT}: coefficients scale like E**-(deg+1)"
            " and cancel on evaluation",
            SmallExponentWarning,
            stacklevel=2,
        )
    n = len(s.coeffs)
    sigma = [0.0] * n
    nxt = 0.0
    for k in range(n - 1, -1, -1):
        nxt = (s.coeffs[k] + (k + 1) * nxt) / E
        sigma[k] = nxt
    return Polynomial(sigma)


def recurrence_residual(s: Polynomial, sigma: Polynomial, E: float) -> float:
    """max over k of |coeff k of E*sigma - sigma' - s| relative to the terms that cancel there.

    The scale is |E sigma_k| + |(k+1) sigma_{k+1}| + |s_k|, so a small E (where
    sigma is much larger than s) is not mistaken for an inexact solve.
    """
    n = max(len(s.coeffs), len(sigma.coeffs)) + 1
    sg = np.zeros(n)
    sg[: len(sigma.coeffs)] = sigma.coeffs
    sv = np.zeros(n)
    sv[: len(s.coeffs)] = s.coeffs
    d = np.zeros(n)
    d[:-1] = np.arange(1, n) * sg[1:]
    r = np.abs(E * sg - d - sv)
    scale = np.abs(E * sg) + np.abs(d) + np.abs(sv)
    scale[scale == 0.0] = 1.0
    return float(np.max(r / scale))

