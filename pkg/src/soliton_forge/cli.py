"""Command-line front end.

Exit codes: 0 success, 1 invalid spec or configuration, 2 construction of an
ill-defined metric requested, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .classify import Case, classify, sweep
from .criticals import critical_values
from .errors import NumericalError, SolitonForgeError, SpecError
from .geometry import sample_geometry
from .model import BundleSpec, SolitonClass, validate_spec
from .poly import SmallExponentWarning
from .profile import build_profile
from .verify import run_verification

EXIT_OK = 0
EXIT_SPEC = 1
EXIT_ILL_DEFINED = 2
EXIT_NUMERICAL = 3

DEFAULT_TOL = 1e-9


class ConfigError(SolitonForgeError, ValueError):
    """Job configuration that cannot be turned into a run."""


@dataclass(frozen=True)
class JobConfig:
    spec: BundleSpec
    E: float | None = None
    E_mode: str | None = None
    umin: float | None = None
    samples: int = 200
    u_cap: float | None = None
    tol: float = DEFAULT_TOL
    out: str | None = None
    format: str | None = None
    einstein_sign: float | None = None
    E_min: float | None = None
    E_max: float | None = None
    steps: int | None = None

    def resolve_E(self, crit=None) -> float:
        if self.E_mode is not None:
            if self.spec.soliton_class is not SolitonClass.SHRINKING:
                raise ConfigError("E_mode is only valid for the shrinking class")
            if crit is None:
                crit = critical_values(self.spec)
            return crit.E0 if self.E_mode == "E0" else crit.E1
        if self.E is None:
            raise ConfigError("either E or E_mode is required")
        return self.E


_JOB_KEYS = {
    "class", "base_dim", "lambdas", "E", "E_mode", "umin", "samples", "u_cap", "tol",
    "out", "format", "einstein_sign", "E_min", "E_max", "steps",
}


def make_config(raw: dict[str, Any]) -> JobConfig:
    unknown = set(raw) - _JOB_KEYS
    if unknown:
        raise ConfigError(f"unknown job fields: {sorted(unknown)}")
    if raw.get("class") is None:
        raise ConfigError("'class' is required")
    try:
        spec = validate_spec(raw)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad bundle fields: {exc}") from exc
    mode = raw.get("E_mode")
    if mode is not None and mode not in ("E0", "E1"):
        raise ConfigError(f"E_mode must be 'E0' or 'E1', got {mode!r}")
    if raw.get("E") is not None and mode is not None:
        raise ConfigError("give E or E_mode, not both")
    fmt = raw.get("format")
    if fmt is not None and fmt not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    samples = int(raw.get("samples") or 200)
    if samples < 1:
        raise ConfigError("samples must be >= 1")

    def opt(key, conv=float):
        v = raw.get(key)
        return None if v is None else conv(v)

    return JobConfig(
        spec=spec,
        E=opt("E"),
        E_mode=mode,
        umin=opt("umin"),
        samples=samples,
        u_cap=opt("u_cap"),
        tol=float(raw["tol"]) if raw.get("tol") is not None else DEFAULT_TOL,
        out=raw.get("out"),
        format=fmt,
        einstein_sign=opt("einstein_sign"),
        E_min=opt("E_min"),
        E_max=opt("E_max"),
        steps=opt("steps", int),
    )


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_criticals(cfg: JobConfig) -> int:
    if cfg.spec.soliton_class is not SolitonClass.SHRINKING:
        print("error: criticals defined for shrinking only", file=sys.stderr)
        return EXIT_SPEC
    crit = critical_values(cfg.spec)
    _emit(_dumps(crit.to_dict()), cfg.out)
    return EXIT_OK


def cmd_classify(cfg: JobConfig) -> int:
    rep = classify(cfg.spec, cfg.resolve_E(), cfg.umin)
    _emit(_dumps(rep.to_dict()), cfg.out)
    return EXIT_OK


def cmd_construct(cfg: JobConfig) -> int:
    crit = critical_values(cfg.spec) if cfg.spec.soliton_class is SolitonClass.SHRINKING else None
    rep = classify(cfg.spec, cfg.resolve_E(crit), cfg.umin, criticals=crit)
    if rep.case is Case.ILL_DEFINED:
        print(f"error: metric is ill-defined for E = {rep.E!r}; construction refused", file=sys.stderr)
        for d in rep.diagnostics:
            print(f"  {d}", file=sys.stderr)
        print(f"  umax = {rep.umax!r}, end behavior: {rep.umax_behavior.to_dict()}", file=sys.stderr)
        return EXIT_ILL_DEFINED
    profile = build_profile(cfg.spec, rep.E_used, cfg.umin)
    table = sample_geometry(profile, cfg.samples, cfg.u_cap, umax=rep.umax, eps=cfg.einstein_sign)
    if (cfg.format or "csv") == "csv":
        _emit(table.to_csv(), cfg.out)
    else:
        _emit(_dumps(table.to_dict()), cfg.out)
    return EXIT_OK


def cmd_sweep(cfg: JobConfig) -> int:
    if cfg.E_min is None or cfg.E_max is None or cfg.steps is None:
        raise ConfigError("sweep needs E_min, E_max and steps")
    if cfg.steps < 1 or (cfg.steps > 1 and not cfg.E_min < cfg.E_max):
        raise ConfigError("sweep needs steps >= 1 and E_min < E_max")
    Es = [cfg.E_min] if cfg.steps == 1 else np.linspace(cfg.E_min, cfg.E_max, cfg.steps)
    rows = sweep(cfg.spec, Es, cfg.umin)
    if (cfg.format or "csv") == "csv":
        lines = ["E,case,umax,E0,E1"]
        for r in rows:
            cells = [repr(r.E), r.case.value, repr(r.umax)]
            cells += ["" if v is None else repr(v) for v in (r.E0, r.E1)]
            lines.append(",".join(cells))
        _emit("\n".join(lines) + "\n", cfg.out)
    else:
        data = [
            {
                "E": r.E,
                "case": r.case.value,
                "umax": r.umax if math.isfinite(r.umax) else "inf",
                "E0": r.E0,
                "E1": r.E1,
            }
            for r in rows
        ]
        _emit(_dumps(data), cfg.out)
    return EXIT_OK


def cmd_verify(cfg: JobConfig) -> int:
    crit = critical_values(cfg.spec) if cfg.spec.soliton_class is SolitonClass.SHRINKING else None
    rep = classify(cfg.spec, cfg.resolve_E(crit), cfg.umin, criticals=crit)
    if rep.case is Case.ILL_DEFINED:
        print(f"error: metric is ill-defined for E = {rep.E!r}; nothing to verify", file=sys.stderr)
        return EXIT_ILL_DEFINED
    profile = build_profile(cfg.spec, rep.E_used, cfg.umin)
    result = run_verification(
        profile,
        n_samples=cfg.samples,
        u_cap=cfg.u_cap,
        umax=rep.umax,
        eps=cfg.einstein_sign,
        tol_scale=cfg.tol / DEFAULT_TOL,
    )
    lines = [s.line() for s in result.suites]
    _emit("\n".join(lines) + "\n", cfg.out)
    if not result.passed:
        print(f"error: failing suites: {', '.join(result.failing())}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


COMMANDS = {
    "criticals": cmd_criticals,
    "construct": cmd_construct,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--job", help="JSON job file; explicit flags override its fields")
    common.add_argument("--class", dest="class", choices=["shrinking", "expanding", "steady"])
    common.add_argument("--base-dim", dest="base_dim", type=int)
    common.add_argument("--lambda", dest="lambdas", type=float, action="append", metavar="LAMBDA")
    common.add_argument("--E", dest="E", type=float)
    common.add_argument("--E-mode", dest="E_mode", choices=["E0", "E1"])
    common.add_argument("--umin", type=float, help="zero-section value of U (steady class only)")
    common.add_argument("--samples", type=int, help="number of grid intervals (default 200)")
    common.add_argument("--u-cap", dest="u_cap", type=float)
    common.add_argument("--tol", type=float, help="ODE residual tolerance (default 1e-9)")
    common.add_argument("--einstein-sign", dest="einstein_sign", type=float, choices=[-1.0, 1.0])
    common.add_argument("--out")
    common.add_argument("--format", choices=["csv", "json"])

    parser = argparse.ArgumentParser(
        prog="soliton-forge",
        description="Gradient Kahler-Ricci soliton profiles on line bundles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "sweep":
            p.add_argument("--E-min", dest="E_min", type=float)
            p.add_argument("--E-max", dest="E_max", type=float)
            p.add_argument("--steps", type=int)
    return parser


def _merge(ns: argparse.Namespace) -> dict[str, Any]:
    flags = vars(ns).copy()
    flags.pop("command")
    raw: dict[str, Any] = {}
    job = flags.pop("job", None)
    if job:
        with open(job, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ConfigError("job file must hold a JSON object")
    raw.update(flags)
    if "lambdas" in flags and "base_dim" not in flags:
        raw["base_dim"] = len(flags["lambdas"])
    return raw


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = make_config(_merge(ns))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", SmallExponentWarning)
            code = COMMANDS[ns.command](cfg)
        small = [w for w in caught if issubclass(w.category, SmallExponentWarning)]
        if small:
            print(
                f"warning: {len(small)} profile(s) with |E| < 0.1; sigma coefficients"
                " grow like E**-(deg+1) and lose digits to cancellation",
                file=sys.stderr,
            )
        for w in caught:
            if not issubclass(w.category, SmallExponentWarning):
                warnings.showwarning(w.message, w.category, w.filename, w.lineno)
        return code
    except (SpecError, ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except NumericalError as exc:
        print(f"error: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SolitonForgeError as exc:
        # InvalidUmin and friends are input problems
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
