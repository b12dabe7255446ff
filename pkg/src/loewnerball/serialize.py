"""
JSON file formats for maps and fields.

Map file::

    {"truncation_degree": 8,
     "terms": [{"component": 1, "alpha": [0, 2], "re": 2.598..., "im": 0.0}, ...]}

Field file: the same terms wrapped in pieces::

    {"truncation_degree": 8,
     "pieces": [{"t_start": 0.0, "terms": [...]}]}

The linear part is implied (``+z`` for maps, ``-z`` for fields). Linear or
constant terms may be listed, but only with the implied value. Output is
canonical: sorted keys, floats with 17 significant digits, terms in
(component, degree-graded) order, so emitted files re-parse and re-emit
byte for byte. Closed-form remainders of rational fields are not
serialized; a written Koebe field is its truncation.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ValidationError
from .herglotz import FieldPiece, HerglotzField, make_field
from .powerseries import PolyMap2, basis


class SchemaError(ValidationError):
    pass


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return format(x + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0


def canonical_dumps(obj) -> str:
    """JSON text with sorted keys and 17-significant-digit floats."""
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ", ".join(f"{json.dumps(str(k))}: {canonical_dumps(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(canonical_dumps(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def complex_record(z: complex) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def _terms(series: PolyMap2) -> list[dict]:
    b = basis(series.truncation_degree)
    out = []
    for j, comp in ((1, series.comp1), (2, series.comp2)):
        arr = comp.array
        for k in np.flatnonzero(arr):
            alpha = b.alphas[k]
            if alpha.degree <= 1:
                continue
            out.append({"component": j, "alpha": [alpha.a1, alpha.a2],
                        "re": float(arr[k].real), "im": float(arr[k].imag)})
    return out


def map_to_dict(f: PolyMap2) -> dict:
    return {"truncation_degree": f.truncation_degree, "terms": _terms(f)}


def field_to_dict(G: HerglotzField) -> dict:
    return {"truncation_degree": G.truncation_degree,
            "pieces": [{"t_start": p.t_start, "terms": _terms(p.series)} for p in G.pieces]}


def _need(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{where}: missing required key {key!r}")
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise SchemaError(f"{where}.{key}: expected integer, got {val!r}")
    if kind is float and (isinstance(val, bool) or not isinstance(val, (int, float))):
        raise SchemaError(f"{where}.{key}: expected number, got {val!r}")
    if kind is list and not isinstance(val, list):
        raise SchemaError(f"{where}.{key}: expected array, got {type(val).__name__}")
    return val


def _parse_terms(terms, degree: int, linear: float, where: str) -> PolyMap2:
    b = basis(degree)
    arr = np.zeros((2, b.size), dtype=complex)
    implied = {(1, (1, 0)): linear, (2, (0, 1)): linear}
    for i, t in enumerate(terms):
        loc = f"{where}[{i}]"
        j = _need(t, "component", int, loc)
        if j not in (1, 2):
            raise SchemaError(f"{loc}.component: must be 1 or 2, got {j}")
        alpha = _need(t, "alpha", list, loc)
        if len(alpha) != 2 or any(isinstance(a, bool) or not isinstance(a, int) or a < 0 for a in alpha):
            raise SchemaError(f"{loc}.alpha: expected two nonnegative integers, got {alpha!r}")
        if sum(alpha) > degree:
            raise SchemaError(f"{loc}.alpha: {alpha} exceeds truncation degree {degree}")
        value = complex(float(_need(t, "re", float, loc)), float(_need(t, "im", float, loc)))
        if sum(alpha) <= 1:
            want = implied.get((j, tuple(alpha)), 0.0)
            if value != want:
                raise SchemaError(
                    f"{loc}: linear/constant term {j}:{alpha} = {value} contradicts implied value {want}")
            continue
        arr[j - 1, b.index[tuple(alpha)]] += value
    arr[0, b.index[(1, 0)]] = linear
    arr[1, b.index[(0, 1)]] = linear
    return PolyMap2.from_arrays(degree, arr)


def map_from_dict(obj, where: str = "$") -> PolyMap2:
    degree = _need(obj, "truncation_degree", int, where)
    if degree < 1:
        raise SchemaError(f"{where}.truncation_degree: must be >= 1")
    return _parse_terms(_need(obj, "terms", list, where), degree, 1.0, f"{where}.terms")


def field_from_dict(obj, where: str = "$") -> HerglotzField:
    degree = _need(obj, "truncation_degree", int, where)
    if degree < 1:
        raise SchemaError(f"{where}.truncation_degree: must be >= 1")
    pieces = []
    for i, p in enumerate(_need(obj, "pieces", list, where)):
        loc = f"{where}.pieces[{i}]"
        t = float(_need(p, "t_start", float, loc))
        pieces.append(FieldPiece(t, _parse_terms(_need(p, "terms", list, loc), degree, -1.0, f"{loc}.terms")))
    return make_field(pieces)


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def dumps_map(f: PolyMap2, **extra) -> str:
    d = map_to_dict(f)
    d.update(extra)
    return canonical_dumps(d)


def dumps_field(G: HerglotzField) -> str:
    return canonical_dumps(field_to_dict(G))
