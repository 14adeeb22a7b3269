"""Bracketed bisection and grid sign scans."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import NoSignChange


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-12, max_iter: int = 400):
    """Root of ``f`` in [lo, hi] by bisection; ``f(lo)`` and ``f(hi)`` must differ in sign.

    Stops once the bracket is no wider than ``xtol`` (or the midpoint stops moving)
    and returns ``(root, (lo, hi))``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo, (lo, lo)
    if fhi == 0:
        return hi, (hi, hi)
    if _sign(flo) == _sign(fhi) or math.isnan(flo) or math.isnan(fhi):
        raise NoSignChange(f"no sign change on [{lo!r}, {hi!r}]: f = {flo!r}, {fhi!r}")
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid, (mid, mid)
        if _sign(fm) == _sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi), (lo, hi)


def sign_change_brackets(xs: np.ndarray, ys: np.ndarray) -> list[tuple[float, float]]:
    """Consecutive grid intervals over which ``ys`` changes sign (or lands on zero)."""
    s = np.sign(ys)
    out = []
    for i in range(len(xs) - 1):
        if s[i] == 0 or np.isnan(s[i]) or np.isnan(s[i + 1]):
            continue
        if s[i + 1] == 0 or s[i] != s[i + 1]:
            out.append((float(xs[i]), float(xs[i + 1])))
    return out
