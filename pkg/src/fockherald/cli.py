"""Command-line front end.

Subcommands: ``simulate``, ``scan``, ``verify`` and ``export-recipe``. All
reports are JSON with sorted keys, so identical inputs give identical bytes.

Exit codes: 0 success, 1 other error, 2 usage, 3 schema, 4 resource limit,
5 validation (failed gate or non-unitary input), 6 unachievable target.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from . import __version__
from .circuits import (
    CircuitRecipe,
    build_fig2,
    build_fig3,
    chi_prep_damping,
    chi_prep_herald_interference,
    closed_forms,
)
from .errors import (
    DomainError,
    ResourceLimitError,
    SchemaError,
    TuningError,
    UnachievableTargetError,
    UnitarityError,
    ValidationGateError,
)
from .fock import CutoffPolicy, DEFAULT_ZERO_THRESHOLD
from .herald import HeraldPattern, HeraldResult, epsilon_ratio
from .interferometer import beamsplitter_r, compose
from .specs import dumps, load_json, recipe_from_json, recipe_to_json, unitary_from_json
from .verify import GRAY_ZONE_UPPER, MACHINE_EPS, classify_gray_zone, external_sources, verify_external

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_SCHEMA, EXIT_RESOURCE, EXIT_VALIDATION, EXIT_UNACHIEVABLE = range(7)

KEY_ORDER_NOTE = "amplitude keys list the undetected modes in ascending circuit-mode order"


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _header(command: str, inputs) -> dict:
    return {"tool": "fockherald", "version": __version__, "command": command, "input_digest": digest(inputs)}


def closed_form_block(recipe: CircuitRecipe, result: HeraldResult) -> dict | None:
    cf = recipe.closed_form
    if not cf:
        return None
    report = closed_forms(cf["a"], cf["b"], cf["lambda"])
    block = report.to_json()
    for label, normalized in (("printed", False), ("normalized", True)):
        table = report.amplitude_table(normalized)
        keys = set(table) | set(result.amplitude_table)
        block[f"max_deviation_{label}"] = max(
            (abs(result.amplitude_table.get(k, 0) - table.get(k, 0)) for k in keys), default=0.0
        )
    block["p_succ_deviation"] = abs(result.success_probability - report.p_succ)
    return block


def recipe_report(recipe: CircuitRecipe, result: HeraldResult, command: str, inputs, gray=None) -> dict:
    rep = _header(command, inputs)
    rep["key_order"] = KEY_ORDER_NOTE
    rep["output_labels"] = list(recipe.output_mode_labels)
    rep["result"] = result.to_json()
    rep["epsilon"] = None
    if recipe.target is not None and result.success_probability > 0:
        rep["epsilon"] = epsilon_ratio(result, recipe.target)
    block = closed_form_block(recipe, result)
    if block is not None:
        rep["closed_form"] = block
    if gray is not None:
        rep["gray_zone"] = [e.to_json() for e in gray]
    return rep


def _write(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_herald(text: str) -> HeraldPattern:
    try:
        pairs = [item.split(":") for item in text.split(",") if item.strip()]
        return HeraldPattern.from_mapping({int(m): int(c) for m, c in pairs})
    except (ValueError, DomainError) as exc:
        raise SchemaError(f"--herald: expected 'mode:count,...', got {text!r} ({exc})") from None


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise SchemaError(f"{flag}: expected a comma-separated list of numbers, got {text!r}") from None


def _parse_range(text: str) -> list[float]:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise SchemaError(f"--range: expected start:stop:step, got {text!r}") from None
    if step <= 0:
        raise SchemaError("--range: step must be positive")
    if stop < start:
        return []
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _run_recipe(recipe: CircuitRecipe, precision: str):
    result = recipe.run()
    gray = None
    if precision == "extended":
        u = compose(recipe.circuit)
        gray = classify_gray_zone(result, u, recipe.sources, recipe.cutoff)
    return result, gray


def cmd_simulate(args) -> int:
    doc = load_json(args.spec)
    recipe = recipe_from_json(doc, cutoff=args.cutoff)
    result, gray = _run_recipe(recipe, args.precision)
    rep = recipe_report(recipe, result, "simulate", {"spec": doc, "cutoff": args.cutoff, "precision": args.precision}, gray)
    _write(dumps(rep), args.out)
    return EXIT_OK


def _scan_point(doc, param, value, cutoff):
    recipe = recipe_from_json(doc, overrides={param: value}, cutoff=cutoff)
    result = recipe.run()
    eps = None
    if recipe.target is not None and result.success_probability > 0:
        eps = epsilon_ratio(result, recipe.target)
    return {"value": value, "epsilon": eps, "p_succ": result.success_probability}


def scan_curve(doc, param: str, values: Sequence[float], cutoff=None, workers: int = 1) -> list[dict]:
    if workers > 1 and len(values) > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_scan_point, doc, param, v, cutoff) for v in values]
            points = [f.result() for f in futures]
    else:
        points = [_scan_point(doc, param, v, cutoff) for v in values]
    return sorted(points, key=lambda p: p["value"])


def bisect_target(doc, param, lo, hi, target, cutoff=None, tol=1e-6):
    """Bisection on the simulated epsilon between two bracketing parameter values."""

    def f(v):
        e = _scan_point(doc, param, v, cutoff)["epsilon"]
        if e is None:
            raise UnachievableTargetError(f"epsilon undefined at {param}={v}")
        return e - target

    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= tol * 1e-3 or hi - lo < 1e-14:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cmd_scan(args) -> int:
    doc = load_json(args.spec)
    values = _parse_range(args.range)
    rep = _header("scan", {"spec": doc, "param": args.param, "range": args.range, "target": args.target, "cutoff": args.cutoff})
    rep["param"] = args.param
    points = scan_curve(doc, args.param, values, args.cutoff, args.workers)
    rep["curve"] = points
    if args.target is not None and points:
        eps = [p["epsilon"] for p in points]
        if any(e is None for e in eps):
            raise UnachievableTargetError("template has no target key or the herald never fires")
        lo_e, hi_e = min(eps), max(eps)
        if not lo_e <= args.target <= hi_e:
            raise UnachievableTargetError(
                f"epsilon {args.target} outside the range [{lo_e:.6g}, {hi_e:.6g}] seen on the scan", (lo_e, hi_e)
            )
        diffs = np.sign(np.array(eps) - args.target)
        idx = next(i for i in range(len(eps)) if diffs[i] == 0 or (i + 1 < len(eps) and diffs[i] != diffs[i + 1]))
        if diffs[idx] == 0:
            best = points[idx]["value"]
        else:
            best = bisect_target(doc, args.param, points[idx]["value"], points[idx + 1]["value"], args.target, args.cutoff)
        recipe = recipe_from_json(doc, overrides={args.param: best}, cutoff=args.cutoff)
        result = recipe.run()
        rep["solution"] = {"value": best, "report": recipe_report(recipe, result, "simulate", {"spec": doc, "param": best})}
    if args.plot_data:
        with open(args.plot_data, "w") as fh:
            fh.write(f"# {args.param}\tepsilon\tp_succ\n")
            for p in points:
                fh.write(f"{p['value']!r}\t{p['epsilon']!r}\t{p['p_succ']!r}\n")
    _write(dumps(rep), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    raw = load_json(args.unitary)
    try:
        u = unitary_from_json(raw, tol=args.unitarity_tol, polish=args.polish)
    except UnitarityError as exc:
        sys.stderr.write(dumps({"error": "non-unitary input", "deviation": exc.deviation, "tolerance": args.unitarity_tol}))
        raise
    squeeze = _parse_floats(args.squeezing, "--squeezing")
    pattern = _parse_herald(args.herald)
    ancillae = args.ancillae if args.ancillae is not None else u.dim - len(squeeze)
    source_modes = [int(x) for x in _parse_floats(args.source_modes, "--source-modes")] if args.source_modes else None
    cutoff = CutoffPolicy(args.cutoff if args.cutoff is not None else pattern.photons + 6, args.zero_threshold)
    result = verify_external(u, squeeze, ancillae, pattern, cutoff, source_modes)
    gray = None
    if args.precision == "extended":
        sources = external_sources(squeeze, u.dim, source_modes)
        gray = classify_gray_zone(result, u, sources, cutoff, upper=args.gray_upper, entry_tol=args.entry_tol)
    rep = _header("verify", {"unitary": raw, "squeezing": squeeze, "herald": args.herald, "ancillae": ancillae,
                             "source_modes": source_modes, "cutoff": cutoff.max_total_photons,
                             "zero_threshold": args.zero_threshold, "precision": args.precision,
                             "polish": args.polish, "entry_tol": args.entry_tol})
    rep["key_order"] = KEY_ORDER_NOTE
    rep["result"] = result.to_json()
    if gray is not None:
        rep["gray_zone"] = [e.to_json() for e in gray]
    _write(dumps(rep), args.out)
    return EXIT_OK


def export_named(name: str, a=None, b=None, lam=None, unitary=None) -> CircuitRecipe:
    lam = math.sqrt(0.5) if lam is None else lam
    if name == "fig3":
        if b is None:
            raise SchemaError("export-recipe fig3 needs --b")
        if a is None:
            from .circuits import solve_cancellation

            a = solve_cancellation(b)
        return build_fig3(a, b, lam)
    if name == "fig2":
        return build_fig2(unitary if unitary is not None else beamsplitter_r(0.5), lam)
    if name == "chi-damping":
        return chi_prep_damping(b if b is not None else 0.5, lam)[0]
    if name == "chi-herald":
        return chi_prep_herald_interference(b if b is not None else 0.5, lam)[0]
    raise SchemaError(f"unknown recipe {name!r}")


def cmd_export(args) -> int:
    u = unitary_from_json(load_json(args.unitary)) if args.unitary else None
    recipe = export_named(args.name, args.a, args.b, args.lam, u)
    _write(dumps(recipe_to_json(recipe)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockherald", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--cutoff", type=int, help="maximum total photon number")
        p.add_argument("--precision", choices=("double", "extended"), default="double")

    p = sub.add_parser("simulate", help="run a circuit spec")
    p.add_argument("--spec", required=True)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", help="scan one template parameter")
    p.add_argument("--spec", required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--range", required=True, help="start:stop:step")
    p.add_argument("--target", type=float, help="epsilon to solve for")
    p.add_argument("--plot-data", help="also write a tab-separated curve file")
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="herald an external unitary fed by squeezed vacua")
    p.add_argument("--unitary", required=True)
    p.add_argument("--squeezing", required=True, help="comma list of r values")
    p.add_argument("--herald", required=True, help="mode:count list, 0-based modes")
    p.add_argument("--ancillae", type=int)
    p.add_argument("--source-modes", help="comma list of squeezer positions")
    p.add_argument("--zero-threshold", type=float, default=DEFAULT_ZERO_THRESHOLD)
    p.add_argument("--gray-upper", type=float, default=GRAY_ZONE_UPPER)
    p.add_argument("--entry-tol", type=float, default=MACHINE_EPS, help="relative precision of the matrix entries")
    p.add_argument("--unitarity-tol", type=float, default=1e-8)
    p.add_argument("--polish", action="store_true", help="replace the matrix by its nearest unitary")
    common(p)
    p.set_defaults(func=cmd_verify, precision="extended")

    p = sub.add_parser("export-recipe", help="write a built-in construction as a circuit spec")
    p.add_argument("name", choices=("fig2", "fig3", "chi-damping", "chi-herald"))
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--unitary", help="two-mode unitary for fig2")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        code, msg = EXIT_SCHEMA, f"schema error: {exc}"
    except ResourceLimitError as exc:
        code, msg = EXIT_RESOURCE, f"resource limit: {exc}"
    except UnitarityError as exc:
        code, msg = EXIT_VALIDATION, f"validation failed: {exc}"
    except (ValidationGateError, TuningError) as exc:
        code, msg = EXIT_VALIDATION, f"validation failed: {exc}"
    except UnachievableTargetError as exc:
        code, msg = EXIT_UNACHIEVABLE, f"unachievable target: {exc}"
    except (DomainError, OSError) as exc:
        code, msg = EXIT_ERROR, f"error: {exc}"
    sys.stderr.write(msg + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
