"""Bundle configuration and validation of the eigenvalue hypotheses."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Mapping

from .errors import ClassMismatch, DimensionMismatch, EigenvalueRangeViolation, SpecError

NEAR_BOUND = 1e-12


class SolitonClass(enum.Enum):
    SHRINKING = "shrinking"
    EXPANDING = "expanding"
    STEADY = "steady"

    @property
    def rho(self) -> int:
        """Sign in Ric + rho*g - L_V g = 0."""
        return {"shrinking": -1, "expanding": 1, "steady": 0}[self.value]

    @classmethod
    def parse(cls, value: Any) -> SolitonClass:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise SpecError(
                f"unknown soliton class {value!r}; expected one of shrinking, expanding, steady",
                [Violation("class", None, None, None, f"unknown class {value!r}")],
            ) from None


@dataclass(frozen=True)
class Violation:
    kind: str  # "range" | "class" | "dimension"
    index: int | None
    value: float | None
    bound: str | None
    message: str


@dataclass(frozen=True)
class BundleSpec:
    """Base dimension m, Ricci-form eigenvalues of the line bundle, and soliton class.

    Construct through :func:`validate_spec`; the constructor itself does not check
    the eigenvalue hypotheses.
    """

    base_dim: int
    lambdas: tuple[float, ...]
    soliton_class: SolitonClass

    @property
    def rho(self) -> int:
        return self.soliton_class.rho

    def to_dict(self) -> dict:
        return {
            "class": self.soliton_class.value,
            "base_dim": self.base_dim,
            "lambdas": list(self.lambdas),
        }


def _range_violation(i: int, lam: float, bound: str, exact: float | None) -> Violation:
    msg = f"lambda[{i}] = {lam!r} violates {bound}"
    if exact is not None and abs(lam - exact) <= NEAR_BOUND:
        msg += f" (within {NEAR_BOUND:g} of the bound; did you mean exactly {exact:g}?)"
    return Violation("range", i, lam, bound, msg)


def _check(spec: BundleSpec) -> list[Violation]:
    out: list[Violation] = []
    if spec.base_dim < 0:
        out.append(Violation("dimension", None, None, None, f"base_dim = {spec.base_dim} < 0"))
    if spec.base_dim != len(spec.lambdas):
        out.append(
            Violation(
                "dimension",
                None,
                None,
                None,
                f"base_dim = {spec.base_dim} but {len(spec.lambdas)} eigenvalues given",
            )
        )
    cls = spec.soliton_class
    for i, lam in enumerate(spec.lambdas):
        if cls is SolitonClass.SHRINKING:
            if not -1.0 < lam:
                out.append(_range_violation(i, lam, "-1 < lambda", -1.0))
            elif not lam < 0.0:
                out.append(_range_violation(i, lam, "lambda < 0", 0.0))
        elif cls is SolitonClass.EXPANDING:
            if not lam < -1.0:
                out.append(_range_violation(i, lam, "lambda < -1", -1.0))
        elif lam != -1.0:
            msg = f"steady solitons need the canonical bundle: lambda[{i}] = {lam!r} != -1"
            if abs(lam + 1.0) <= NEAR_BOUND:
                msg += " (round-off? pass exactly -1)"
            out.append(Violation("class", i, lam, "lambda == -1", msg))
    return out


_ERROR_FOR_KIND = {
    "dimension": DimensionMismatch,
    "range": EigenvalueRangeViolation,
    "class": ClassMismatch,
}


def validate_spec(candidate: BundleSpec | Mapping[str, Any]) -> BundleSpec:
    """Return a validated :class:`BundleSpec` or raise with every violation attached.

    ``candidate`` may be a BundleSpec or a job mapping with keys ``class``,
    ``base_dim`` and ``lambdas``. For the steady class, ``lambdas`` may be
    omitted and defaults to ``base_dim`` copies of -1.
    """
    if isinstance(candidate, BundleSpec):
        spec = candidate
    else:
        cls = SolitonClass.parse(candidate.get("class", candidate.get("soliton_class")))
        lambdas = candidate.get("lambdas")
        base_dim = candidate.get("base_dim")
        if lambdas is None:
            if cls is SolitonClass.STEADY and base_dim is not None:
                lambdas = [-1.0] * int(base_dim)
            else:
                lambdas = []
        lambdas = tuple(float(x) for x in lambdas)
        if base_dim is None:
            base_dim = len(lambdas)
        spec = BundleSpec(int(base_dim), lambdas, cls)
    violations = _check(spec)
    if violations:
        exc = _ERROR_FOR_KIND[violations[0].kind]
        raise exc("; ".join(v.message for v in violations), violations)
    return spec


def shrinking(*lambdas: float) -> BundleSpec:
    return validate_spec(BundleSpec(len(lambdas), tuple(map(float, lambdas)), SolitonClass.SHRINKING))


def expanding(*lambdas: float) -> BundleSpec:
    return validate_spec(BundleSpec(len(lambdas), tuple(map(float, lambdas)), SolitonClass.EXPANDING))


def steady(base_dim: int) -> BundleSpec:
    """Canonical bundle over a base of complex dimension ``base_dim``."""
    return validate_spec(BundleSpec(base_dim, (-1.0,) * base_dim, SolitonClass.STEADY))
