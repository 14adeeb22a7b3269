"""Gradient Kahler-Ricci solitons of Calabi type on holomorphic line bundles.

The metric is reduced to one momentum profile phi(U) that solves a linear
first-order ODE in closed form. The package builds that profile, finds the
critical soliton parameters E0 and E1 of the shrinking family, classifies
completeness, samples curvature along arclength and cross-checks everything
against independent numerical oracles.
"""

from .classify import Case, CompletenessReport, Location, classify, endpoint_analysis, sweep, umax_of
from .criticals import CriticalValues, critical_values, find_E0, find_E1
from .errors import (
    ClassificationConflict,
    ClassMismatch,
    DimensionMismatch,
    EigenvalueRangeViolation,
    InvalidUmin,
    NoSignChange,
    NumericalError,
    SolitonForgeError,
    SpecError,
)
from .geometry import (
    GeometryTable,
    arclength_t,
    log_radius,
    radius_r,
    ricci_eigenvalues,
    sample_geometry,
    soliton_identity_residual,
)
from .model import BundleSpec, SolitonClass, expanding, shrinking, steady, validate_spec
from .poly import Polynomial, exp_weighted_antiderivative, q_from_eigenvalues
from .profile import SolitonProfile, build_profile, ode_residual, phi, w_prime, w_value
from .verify import run_verification

__version__ = "0.1.0"

__all__ = [
    "BundleSpec",
    "Case",
    "ClassMismatch",
    "ClassificationConflict",
    "CompletenessReport",
    "CriticalValues",
    "DimensionMismatch",
    "EigenvalueRangeViolation",
    "GeometryTable",
    "InvalidUmin",
    "Location",
    "NoSignChange",
    "NumericalError",
    "Polynomial",
    "SolitonClass",
    "SolitonForgeError",
    "SolitonProfile",
    "SpecError",
    "arclength_t",
    "build_profile",
    "classify",
    "critical_values",
    "endpoint_analysis",
    "exp_weighted_antiderivative",
    "expanding",
    "find_E0",
    "find_E1",
    "log_radius",
    "ode_residual",
    "phi",
    "q_from_eigenvalues",
    "radius_r",
    "ricci_eigenvalues",
    "run_verification",
    "sample_geometry",
    "shrinking",
    "soliton_identity_residual",
    "steady",
    "sweep",
    "umax_of",
    "validate_spec",
    "w_prime",
    "w_value",
]
