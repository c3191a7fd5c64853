"""JSON formats: circuit specs, unitaries and state records.

A circuit spec looks like::

    {
      "modes": 6,
      "params": {"b": 0.75, "lambda": 0.7071067811865476},
      "cutoff": 6,
      "sources": [{"kind": "tmss", "modes": [0, 2], "lambda": "=lambda"},
                  {"kind": "chi", "modes": [4, 5], "b": "=b"}],
      "elements": [{"kind": "beamsplitter", "modes": [3, 4], "a": "=sqrt(1/b - 1)"}],
      "herald": {"modes": [2, 3], "counts": [1, 1]},
      "output_labels": ["1", "2", "7", "8"],
      "target": [1, 1, 1, 1]
    }

Modes are 0-based. Any numeric field may be a string starting with ``=``,
evaluated as an arithmetic expression over ``params`` (see
:func:`evaluate`). Unitaries are row-major 2-D arrays of ``[re, im]`` pairs.
"""
from __future__ import annotations

import ast
import json
import keyword
import math
import operator
import re
from typing import Any, Mapping

import numpy as np

from .circuits import CircuitRecipe, SourceSpec, solve_cancellation
from .errors import DomainError, SchemaError
from .fock import CutoffPolicy, DEFAULT_ZERO_THRESHOLD
from .herald import HeraldPattern
from .interferometer import Circuit, CircuitElement, ModeUnitary

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {
    "sqrt": math.sqrt,
    "tanh": math.tanh,
    "atanh": math.atanh,
    "exp": math.exp,
    "cos": math.cos,
    "sin": math.sin,
    "cancel": solve_cancellation,
}
_CONSTS = {"pi": math.pi}


def evaluate(expr: str, params: Mapping[str, float]) -> float:
    """Evaluate an arithmetic expression over named parameters.

    Supports ``+ - * / **``, numbers, parameter names, ``pi`` and the
    functions ``sqrt tanh atanh exp cos sin`` plus ``cancel(b)`` (the
    cancellation beamsplitter parameter).
    """

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Name):
            name = node.id[:-1] if node.id[:-1] in keyword.kwlist else node.id
            if name in params:
                return float(params[name])
            if node.id in _CONSTS:
                return _CONSTS[node.id]
            raise SchemaError(f"unknown parameter {node.id!r}")
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
            return float(_FUNCS[node.func.id](*(ev(a) for a in node.args)))
        raise SchemaError(f"unsupported expression element {ast.dump(node)}")

    # parameter names may collide with Python keywords ("lambda")
    expr = re.sub(r"\b(" + "|".join(keyword.kwlist) + r")\b", r"\1_", expr)
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise SchemaError(f"cannot parse expression {expr!r}: {exc.msg}") from None
    return ev(tree)


def _num(value, params, path) -> float:
    if isinstance(value, bool):
        raise SchemaError(f"{path}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str) and value.startswith("="):
        try:
            return evaluate(value[1:], params)
        except SchemaError as exc:
            raise SchemaError(f"{path}: {exc}") from None
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise SchemaError(f"{path}: expression {value!r} failed: {exc}") from None
    raise SchemaError(f"{path}: expected a number or '=expression', got {value!r}")


def _int_list(value, path) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise SchemaError(f"{path}: expected a list of integers, got {value!r}")
    return list(value)


def _require(obj, key, path):
    if not isinstance(obj, Mapping):
        raise SchemaError(f"{path}: expected an object")
    if key not in obj:
        raise SchemaError(f"{path}: missing field {key!r}")
    return obj[key]


def unitary_from_json(data, tol: float = 1e-8, polish: bool = False) -> ModeUnitary:
    """Parse a row-major array of ``[re, im]`` pairs (bare numbers count as real)."""
    if not isinstance(data, list) or not data:
        raise SchemaError("unitary: expected a non-empty 2-D array")
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != len(data):
            raise SchemaError(f"unitary[{i}]: expected a row of {len(data)} entries")
        vals = []
        for j, entry in enumerate(row):
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                vals.append(complex(entry))
            elif isinstance(entry, list) and len(entry) == 2 and all(isinstance(x, (int, float)) for x in entry):
                vals.append(complex(entry[0], entry[1]))
            else:
                raise SchemaError(f"unitary[{i}][{j}]: expected [re, im], got {entry!r}")
        rows.append(vals)
    m = np.array(rows, dtype=complex)
    if polish:
        from .interferometer import nearest_unitary

        m = nearest_unitary(m)
    return ModeUnitary(m, tol=tol)


def unitary_to_json(u) -> list:
    m = np.asarray(u, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


_SOURCE_PARAMS = {"tmss": ("lambda", "r"), "smsv": ("r",), "chi": ("b",), "fock": (), "vacuum": ()}


def _source_from_json(obj, params, path) -> SourceSpec:
    kind = _require(obj, "kind", path)
    if kind not in _SOURCE_PARAMS:
        raise SchemaError(f"{path}.kind: unknown source kind {kind!r}")
    modes = _int_list(_require(obj, "modes", path), f"{path}.modes")
    p: dict[str, Any] = {}
    names = [n for n in _SOURCE_PARAMS[kind] if n in obj]
    if kind == "tmss" and not names:
        raise SchemaError(f"{path}: tmss needs 'lambda' or 'r'")
    if kind in ("smsv", "chi") and not names:
        raise SchemaError(f"{path}: missing field {_SOURCE_PARAMS[kind][0]!r}")
    for n in names:
        p[n] = _num(obj[n], params, f"{path}.{n}")
    if kind == "fock":
        p["occupations"] = tuple(_int_list(_require(obj, "occupations", path), f"{path}.occupations"))
    try:
        return SourceSpec(kind, tuple(modes), p)
    except DomainError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def _element_from_json(obj, params, path) -> CircuitElement:
    kind = _require(obj, "kind", path)
    modes = tuple(_int_list(_require(obj, "modes", path), f"{path}.modes"))
    if kind == "beamsplitter":
        p = {"a": _num(_require(obj, "a", path), params, f"{path}.a")}
    elif kind == "phase":
        p = {"phi": _num(_require(obj, "phi", path), params, f"{path}.phi")}
    elif kind == "general":
        try:
            p = {"matrix": unitary_from_json(_require(obj, "matrix", path), tol=1e-10)}
        except SchemaError as exc:
            raise SchemaError(f"{path}.matrix: {exc}") from None
    else:
        raise SchemaError(f"{path}.kind: unknown element kind {kind!r}")
    try:
        el = CircuitElement(kind, modes, p)
        el.unitary()
    except DomainError as exc:
        raise SchemaError(f"{path}: {exc}") from None
    return el


def recipe_from_json(doc: Mapping, overrides: Mapping[str, float] | None = None,
                     cutoff: int | None = None) -> CircuitRecipe:
    """Build a :class:`CircuitRecipe` from a circuit spec document."""
    if not isinstance(doc, Mapping):
        raise SchemaError("spec: expected a JSON object")
    params = dict(doc.get("params", {}))
    if not isinstance(params, dict):
        raise SchemaError("params: expected an object")
    params.update(overrides or {})
    for k, v in params.items():
        params[k] = _num(v, {}, f"params.{k}")
    modes = _require(doc, "modes", "spec")
    if not isinstance(modes, int) or isinstance(modes, bool) or modes < 1:
        raise SchemaError(f"modes: expected a positive integer, got {modes!r}")
    max_total = cutoff if cutoff is not None else doc.get("cutoff", 8)
    if not isinstance(max_total, int) or max_total < 0:
        raise SchemaError(f"cutoff: expected a non-negative integer, got {max_total!r}")
    thr = _num(doc.get("zero_threshold", DEFAULT_ZERO_THRESHOLD), params, "zero_threshold")
    sources = [_source_from_json(s, params, f"sources[{i}]") for i, s in enumerate(doc.get("sources", []))]
    elements = [_element_from_json(e, params, f"elements[{i}]") for i, e in enumerate(doc.get("elements", []))]
    h = doc.get("herald", {"modes": [], "counts": []})
    try:
        pattern = HeraldPattern(tuple(_int_list(_require(h, "modes", "herald"), "herald.modes")),
                                tuple(_int_list(_require(h, "counts", "herald"), "herald.counts")))
    except DomainError as exc:
        raise SchemaError(f"herald: {exc}") from None
    target = doc.get("target")
    closed = doc.get("closed_form")
    if closed is not None:
        closed = {k: _num(v, params, f"closed_form.{k}") for k, v in closed.items()}
    try:
        circuit = Circuit(modes, tuple(elements))
        return CircuitRecipe(
            circuit=circuit,
            sources=tuple(sources),
            herald_pattern=pattern,
            output_mode_labels=tuple(str(x) for x in doc.get("output_labels", ())),
            cutoff=CutoffPolicy(max_total, thr),
            closed_form=closed,
            target=tuple(_int_list(target, "target")) if target is not None else None,
        )
    except DomainError as exc:
        raise SchemaError(f"spec: {exc}") from None


def recipe_to_json(recipe: CircuitRecipe) -> dict:
    """Serialize a recipe with all parameters as plain numbers."""
    sources = []
    for s in recipe.sources:
        obj: dict[str, Any] = {"kind": s.kind, "modes": list(s.modes)}
        for k, v in s.params.items():
            obj[k] = list(v) if k == "occupations" else float(v)
        sources.append(obj)
    elements = []
    for el in recipe.circuit.elements:
        obj = {"kind": el.kind, "modes": list(el.modes)}
        if el.kind == "general":
            obj["matrix"] = unitary_to_json(el.unitary())
        else:
            obj.update({k: float(v) for k, v in el.params.items()})
        elements.append(obj)
    doc: dict[str, Any] = {
        "modes": recipe.circuit.modes,
        "cutoff": recipe.cutoff.max_total_photons,
        "zero_threshold": recipe.cutoff.zero_threshold,
        "sources": sources,
        "elements": elements,
        "herald": {"modes": list(recipe.herald_pattern.detected_modes), "counts": list(recipe.herald_pattern.counts)},
    }
    if recipe.output_mode_labels:
        doc["output_labels"] = list(recipe.output_mode_labels)
    if recipe.target is not None:
        doc["target"] = list(recipe.target)
    if recipe.closed_form is not None:
        doc["closed_form"] = {k: float(v) for k, v in recipe.closed_form.items()}
    return doc


def load_json(path) -> Any:
    """Read a JSON file, turning decode errors into :class:`SchemaError` with line and column."""
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
