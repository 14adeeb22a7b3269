"""Steady profiles with a closed form, checked against the library.

The canonical profile (one base direction, E = -1, Umin = 0) is
phi = 2U/(1+U); the cigar (no base directions, E = -1) is phi = 2(1 - e^-U).

    python3 demos/steady_canonical.py
"""

import math

from soliton_forge import build_profile, phi, ricci_eigenvalues, run_verification, steady
from soliton_forge.geometry import identity_constant


def main():
    canonical = build_profile(steady(1), -1.0, 0.0)
    cigar = build_profile(steady(0), -1.0, 0.0)

    print(f"{'U':>6} {'phi':>14} {'2U/(1+U)':>14} {'ric fiber':>12} {'ric base':>12}")
    for U in (0.0, 0.5, 1.0, 4.0, 25.0):
        fiber, (base,) = ricci_eigenvalues(canonical, U)
        print(f"{U:6.1f} {phi(canonical, U):14.10f} {2 * U / (1 + U):14.10f} {fiber:12.8f} {base:12.8f}")
    print(f"identity constant {identity_constant(canonical):.12f} (expected 2)")
    print()

    print(f"{'U':>6} {'phi':>14} {'2(1-e^-U)':>14}")
    for U in (0.0, 0.5, 2.0, 10.0):
        print(f"{U:6.1f} {phi(cigar, U):14.10f} {2 * (1 - math.exp(-U)):14.10f}")
    print()

    # positive Ricci curvature away from the zero section, for a few E
    for E in (-0.25, -1.0, -4.0):
        p = build_profile(steady(2), E, 0.0)
        worst_fiber = min(ricci_eigenvalues(p, U)[0] for U in (0.0, 1.0, 10.0, 40.0))
        print(f"base_dim 2, E = {E:5.2f}: min fiber Ricci on samples {worst_fiber:.3e}")
    print()

    report = run_verification(canonical, n_samples=100)
    for suite in report.suites:
        print(suite.line())


if __name__ == "__main__":
    main()
