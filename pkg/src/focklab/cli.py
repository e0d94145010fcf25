"""Command-line entry point.

Every subcommand writes one JSON report (sorted keys) to ``--out`` or
stdout. Exit codes: 0 success, 1 failed verification, 2 configuration
error, 3 indeterminate numerics.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .carleson import carleson_verdict, measure_from_json
from .classify import SpacePair, classify, growth_status, profile_radii, ring_log_max, \
    transform_profile
from .fock import fock_norm
from .operators import OperatorSpec, apply
from .quadrature import IndeterminateError, ProbeResult, QuadSpec, UnboundedError
from .symbols import ExpPoly, FockParams, Poly, parse_exponent, poly_from_any
from .transforms import CriterionProfile, Weight, berezin_transform, criterion_sup, \
    radial_profile_of, total_mass

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_INDETERMINATE = 0, 1, 2, 3

POINTWISE_KINDS = {"binf": "B", "minf": "M", "uinf": "U"}
INTEGRAL_KINDS = {"bp": "B", "mp": "M", "up": "U"}
PROFILE_NAMES = {"binf": "Binf", "minf": "Minf", "uinf": "Uinf",
                 "bp": "Bp", "mp": "Mp", "up": "Up"}
POINTWISE_RADII = tuple(float(r) for r in range(1, 21))
INTEGRAL_RADII = (0.0, 1.0, 2.0, 4.0, 8.0)


class ConfigError(ValueError):
    """Bad input files or flag combinations."""


# ---------------------------------------------------------------------------
# serialization


def to_plain(x):
    """Convert to JSON-safe builtins: complex as [re, im], non-finite floats as strings."""
    if isinstance(x, dict):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [to_plain(float(x.real)), to_plain(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if hasattr(x, "to_json"):
        return to_plain(x.to_json())
    return x


def dumps(report: dict) -> str:
    return json.dumps(to_plain(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _symbol(path: str) -> ExpPoly:
    try:
        return ExpPoly.from_json(_read_json(path))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path} is not a symbol: {exc}") from exc


def _poly(path: str) -> Poly:
    try:
        return poly_from_any(_read_json(path))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path} is not a polynomial symbol: {exc}") from exc


def _point(text: str) -> complex:
    try:
        parts = [float(s) for s in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"expected re,im but got {text!r}") from exc
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise ConfigError(f"expected re,im but got {text!r}")
    return complex(*parts)


def _exponent(text) -> float:
    try:
        return parse_exponent(text)
    except ValueError as exc:
        raise ConfigError(f"bad exponent {text!r}") from exc


def _spec(args) -> QuadSpec:
    overrides = {k: getattr(args, k) for k in ("rel_tol", "abs_tol", "max_radius", "base_rings")
                 if getattr(args, k, None) is not None}
    return QuadSpec.from_env(**overrides)


# ---------------------------------------------------------------------------
# subcommands; each returns (results, exit code, csv rows or None)


def cmd_norm(args, spec):
    f = _symbol(args.symbol)
    rep = fock_norm(f, FockParams(args.alpha, _exponent(args.p)), spec)
    return rep.to_json(), EXIT_OK, None


def cmd_apply(args, spec):
    op = OperatorSpec.from_json(_read_json(args.op))
    f = _symbol(args.symbol)
    z = _point(args.at)
    res = apply(op, f)
    out = {"op": op.to_json(), "at": z, "value": complex(res(z)),
           "derivative": complex(res.derivative_symbol(z)),
           "value_at_zero": res.value_at_zero,
           "exact": res.exact.to_json() if res.exact is not None else None}
    return out, EXIT_OK, None


def _weight(args) -> tuple[Weight, str]:
    kind = args.kind
    letter = POINTWISE_KINDS.get(kind) or INTEGRAL_KINDS[kind]
    psi = _poly(args.psi) if args.psi else Poly.identity()
    if letter == "U":
        if not args.u:
            raise ConfigError(f"--kind {kind} needs --u")
        return Weight.build("U", psi, u=_symbol(args.u)), letter
    if not args.g:
        raise ConfigError(f"--kind {kind} needs --g")
    return Weight.build(letter, psi, g=_symbol(args.g)), letter


def _value_pair(res) -> dict:
    if isinstance(res, ProbeResult):
        return {"result": res.to_json(), "value": res.value, "error_bound": res.error_bound}
    return {"value": res[0], "error_bound": res[1]}


def _pointwise_sup(weight: Weight, alpha: float, spec: QuadSpec) -> dict:
    # a scan only sees a bounded region, so the radial growth decides first
    radii = profile_radii(spec)
    status, slope = growth_status(radii, ring_log_max(
        lambda z: weight.log_pointwise(z, alpha), radii))
    out = {"mode": "sup", "growth": status, "tail_slope": slope}
    if status == "unbounded":
        return {**out, "value": math.inf}
    try:
        s = criterion_sup(weight, alpha, spec)
    except UnboundedError:
        return {**out, "growth": "unbounded", "value": math.inf}
    return {**out, "value": max(s.sup, s.limit_estimate or 0.0), "scanned_max": s.sup,
            "argmax": s.argmax, "attained": s.attained_inside,
            "limit_estimate": s.limit_estimate}


def cmd_transform(args, spec):
    weight, _ = _weight(args)
    alpha = args.alpha
    name = PROFILE_NAMES[args.kind]
    modes = [m for m in ("w", "sup", "total") if getattr(args, m) not in (None, False)]
    if len(modes) > 1:
        raise ConfigError("choose at most one of --w, --sup, --total")
    if args.kind in POINTWISE_KINDS:
        mode = modes[0] if modes else "sup"
        if mode == "total":
            raise ConfigError("--total applies to bp, mp and up")
        params = {"alpha": alpha}
        profile = radial_profile_of(weight, alpha, POINTWISE_RADII)
        if mode == "w":
            w = _point(args.w)
            v = float(np.exp(weight.log_pointwise(np.array([w]), alpha))[0])
            inputs = {"mode": "point", "w": w, "value": v, "error_bound": 0.0}
        else:
            inputs = _pointwise_sup(weight, alpha, spec)
    else:
        if args.p is None:
            raise ConfigError(f"--kind {args.kind} needs --p")
        fp = FockParams(alpha, _exponent(args.p))
        if fp.is_infinite:
            raise ConfigError("Berezin-type transforms need a finite --p")
        params = {"alpha": alpha, "p": fp.p}
        mode = modes[0] if modes else "w"
        vals = transform_profile(weight, fp, INTEGRAL_RADII, spec)
        profile = list(zip(INTEGRAL_RADII, (float(v) for v in vals)))
        if mode == "total":
            res = total_mass(weight, fp, spec)
            inputs = {"mode": "total", **_value_pair(res)}
        elif mode == "sup":
            k = int(np.argmax(vals))
            inputs = {"mode": "sup", "value": float(vals[k]), "at_radius": INTEGRAL_RADII[k],
                      "scope": "max over the profile sample points"}
        else:
            w = _point(args.w) if args.w else 0j
            inputs = {"mode": "point", "w": w,
                      **_value_pair(berezin_transform(weight, fp, w, spec))}
    prof = CriterionProfile(name, params, profile, inputs)
    return prof.to_json(), EXIT_OK, prof.radial_profile


def cmd_carleson(args, spec):
    data = _read_json(args.measure)
    try:
        mu = measure_from_json(data)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{args.measure} is not a measure: {exc}") from exc
    if args.rel_tol is None:
        spec = replace(spec, rel_tol=1e-7)
    v = carleson_verdict(mu, _exponent(args.p), args.alpha, t=args.t, r=args.r, spec=spec)
    code = EXIT_INDETERMINATE if v.verdict == "inconclusive" else EXIT_OK
    rows = v.quantities["mass"].result.partial_sums if v.quantities["mass"].result else None
    return v.to_json(), code, rows


def cmd_classify(args, spec):
    op = OperatorSpec.from_json(_read_json(args.op))
    pair = SpacePair.of(args.alpha, args.source, args.target)
    mode = "numeric" if args.numeric_only else "symbolic" if args.symbolic_only else "both"
    v = classify(op, pair, spec, mode=mode)
    code = EXIT_INDETERMINATE if v.indeterminate else EXIT_OK
    out = v.to_json()
    out["op"] = op.to_json()
    out["pair"] = pair.to_json()
    ev = v.numeric_evidence
    prof = ev.get("transform_profile")
    if "profile" in ev:
        prof = [(r, math.exp(lv) if lv < 709 else math.inf)
                for r, lv in ev["profile"]]
    return out, code, prof


def cmd_verify(args, spec):
    from .verify import verify_suite
    if args.suite != "all" and not args.only:
        args.only = args.suite
    summary = verify_suite(args.seed, spec, only=args.only)
    return (summary.to_json(timings=args.timings),
            EXIT_OK if summary.passed else EXIT_FAILED, None)


COMMANDS = {"norm": cmd_norm, "apply": cmd_apply, "transform": cmd_transform,
            "carleson": cmd_carleson, "classify": cmd_classify, "verify": cmd_verify}


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="also write the radial profile as radius,value CSV")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (breaks byte-identical output)")
    common.add_argument("--rel-tol", type=float, dest="rel_tol")
    common.add_argument("--abs-tol", type=float, dest="abs_tol")
    common.add_argument("--max-radius", type=float, dest="max_radius")
    common.add_argument("--base-rings", type=int, dest="base_rings")

    ap = argparse.ArgumentParser(prog="focklab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"focklab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="Fock norm of a symbol")
    p.add_argument("--symbol", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--p", default="2")

    p = sub.add_parser("apply", parents=[common], help="apply an operator at a point")
    p.add_argument("--op", required=True)
    p.add_argument("--symbol", required=True)
    p.add_argument("--at", required=True, help="re,im")

    p = sub.add_parser("transform", parents=[common], help="criterion functions and transforms")
    p.add_argument("--kind", required=True, choices=sorted(PROFILE_NAMES))
    p.add_argument("--g")
    p.add_argument("--psi")
    p.add_argument("--u")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--p")
    p.add_argument("--w", help="re,im")
    p.add_argument("--sup", action="store_true")
    p.add_argument("--total", action="store_true")

    p = sub.add_parser("carleson", parents=[common], help="Fock-Carleson verdict for a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--p", default="2")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--r", type=float, default=1.0)

    p = sub.add_parser("classify", parents=[common], help="bounded/compact verdict")
    p.add_argument("--op", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--numeric-only", action="store_true")
    g.add_argument("--symbolic-only", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("--suite", default="all")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--only", help="run checks whose name contains this")
    return ap


def _inputs(args) -> dict:
    skip = {"out", "csv", "timings"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _write_csv(path: str, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["radius", "value"])
    for r, v in rows:
        w.writerow([repr(float(r)), repr(float(v))])
    Path(path).write_text(buf.getvalue())


def run(argv=None) -> int:
    """Parse ``argv``, dispatch, write the report and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    t0 = time.perf_counter()
    report = {"command": args.command, "inputs": _inputs(args),
              "version": {"focklab": __version__, "numpy": np.__version__,
                          "scipy": scipy.__version__}}
    rows = None
    try:
        spec = _spec(args)
        if getattr(args, "alpha", 1.0) <= 0:
            raise ConfigError("--alpha must be positive")
        report["quad_spec"] = {"rel_tol": spec.rel_tol, "abs_tol": spec.abs_tol,
                               "max_radius": spec.max_radius, "base_rings": spec.base_rings}
        results, code, rows = COMMANDS[args.command](args, spec)
        report["results"] = results
        report["status"] = {EXIT_OK: "ok", EXIT_FAILED: "failed",
                            EXIT_INDETERMINATE: "indeterminate"}[code]
    except IndeterminateError as exc:
        code = EXIT_INDETERMINATE
        report["status"] = "indeterminate"
        report["error"] = str(exc)
        report["partial_sums"] = exc.partial_sums
    except ValueError as exc:  # includes ConfigError and out-of-scope requests
        code = EXIT_CONFIG
        report["status"] = "config_error"
        report["error"] = str(exc)
    if args.timings:
        report["timings"] = {"seconds": time.perf_counter() - t0}
    text = dumps(report)
    try:
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.csv and rows is not None:
            _write_csv(args.csv, rows)
    except OSError as exc:
        sys.stderr.write(f"focklab: cannot write output: {exc}\n")
        return EXIT_CONFIG
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
