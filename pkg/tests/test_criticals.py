import math

import numpy as np
import pytest
from hypothesis import given, settings

from soliton_forge import ClassMismatch, critical_values, find_E0, find_E1, shrinking, steady
from soliton_forge.poly import q_from_eigenvalues
from soliton_forge.profile import build_profile, phi

from conftest import shrinking_specs


def plain_bisect(f, lo, hi, tol=1e-14):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def e1_oracle(lambdas, lo=0.01, hi=3.0, n=3000):
    """E1 from phi(1) = 0, i.e. int_{-1}^{1} exp(-E x) x Q(x) dx = 0, by quadrature + dense scan."""

    # 40-point Gauss-Legendre is exact to rounding for this entire integrand
    x, w = np.polynomial.legendre.leggauss(40)
    xq = x * np.prod([1 - x * l for l in lambdas], axis=0)

    def g(E):
        return float(np.sum(w * np.exp(-E * x) * xq))

    xs = np.linspace(lo, hi, n)
    ys = [g(x) for x in xs]
    i = next(k for k in range(n - 1) if (ys[k] > 0) != (ys[k + 1] > 0))
    return plain_bisect(g, xs[i], xs[i + 1])


def test_e0_sqrt2(half):
    assert find_E0(half) == pytest.approx(math.sqrt(2), abs=1e-10)


def test_e0_two_eigenvalues():
    cubic = lambda E: E**3 + E**2 - 2 * E - 6
    assert find_E0(shrinking(-0.5, -0.5)) == pytest.approx(plain_bisect(cubic, 1.0, 3.0), abs=1e-9)


def test_e1_against_quadrature(half):
    E1 = find_E1(half)
    assert E1 == pytest.approx(e1_oracle([-0.5]), abs=1e-9)
    assert E1 == pytest.approx(0.53, abs=0.01)


def test_e1_makes_phi_vanish_at_one(half):
    p = build_profile(half, find_E1(half))
    assert abs(phi(p, 1.0)) < 1e-9


def test_report(half):
    cv = critical_values(half)
    assert cv.E0_bracket[0] <= cv.E0 <= cv.E0_bracket[1]
    assert cv.E0_bracket[1] - cv.E0_bracket[0] <= 1e-12
    assert cv.E0_residual < 1e-12 and cv.E1_residual < 1e-12
    assert any("negative E" in d for d in cv.diagnostics)
    assert set(cv.to_dict()) >= {"E0", "E1", "E0_bracket", "E1_bracket", "E0_residual", "E1_residual"}


def test_steady_rejected():
    with pytest.raises(ClassMismatch, match="shrinking only"):
        critical_values(steady(1))


@settings(max_examples=30)
@given(shrinking_specs)
def test_ordering(spec):
    cv = critical_values(spec)
    assert 0 < cv.E1 < cv.E0 < math.inf


@settings(max_examples=20)
@given(shrinking_specs)
def test_exponential_term_vanishes_at_E0(spec):
    p = build_profile(spec, find_E0(spec))
    assert p.drop_exponential
    assert abs(p.sigma_at_umin) <= 1e-10 * q_from_eigenvalues(spec.lambdas).max_abs_coeff() * max(
        1.0, p.sigma.max_abs_coeff()
    )
