"""Walk through the shrinking case diagram for one eigenvalue lambda = -1/2.

Prints the two critical values, then one classification per E on a coarse
sweep, then the geometry at the compact end (E = E1).

    python3 demos/shrinking_case_diagram.py
"""

import math

import numpy as np

from soliton_forge import arclength_t, classify, critical_values, shrinking, sweep, umax_of
from soliton_forge.profile import build_profile


def main():
    spec = shrinking(-0.5)
    cv = critical_values(spec)
    print(f"E0 = {cv.E0:.12f}  (sqrt 2 = {math.sqrt(2):.12f})")
    print(f"E1 = {cv.E1:.12f}")
    print()

    print(f"{'E':>10}  {'case':<22} {'Umax':>14}")
    for row in sweep(spec, np.linspace(0.1, 2.0, 12)):
        umax = "inf" if math.isinf(row.umax) else f"{row.umax:.10f}"
        print(f"{row.E:10.6f}  {row.case.value:<22} {umax:>14}")
    print()

    # E = E1 closes the fiber at U = 1 after a finite distance
    p = build_profile(spec, cv.E1)
    u = umax_of(p)
    print(f"at E1: Umax = {u:.13f}, distance to the far end t(Umax) = {arclength_t(p, u):.10f}")

    # E = E0: complete, t grows like sqrt(U)
    rep = classify(spec, cv.E0)
    p0 = build_profile(spec, cv.E0)
    print(f"at E0: {rep.case.value}, phi ~ U^{rep.umax_behavior.phi_order} at infinity")
    for cap in (10.0, 100.0, 1000.0):
        t = arclength_t(p0, p0.umin + cap)
        print(f"  t(Umin + {cap:6.0f}) = {t:9.4f}   t / sqrt(cap) = {t / math.sqrt(cap):.4f}")


if __name__ == "__main__":
    main()
