"""File formats and canonical serialization.

Matrix files are JSON objects ``{"dim": N, "re": [[...]], "im": [[...]]}``
with row-major IEEE-754 doubles; vectors use the same layout with 1-d lists.
Constraint files are nested ``{"kind": ..., "params": {...}, "children":
[...]}`` trees; state vectors and Randers data may be embedded inline or
referenced as ``"file:path"``.

All writers emit floats with 17 significant digits, which round-trips
doubles exactly, and objects with sorted keys, so serializing a parsed
report reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os

import numpy as np

from . import constraints as con
from .errors import ConfigError

FLOAT_FORMAT = ".17g"


# ---------------------------------------------------------------------------
# Canonical JSON
# ---------------------------------------------------------------------------

def _format_float(x: float) -> str:
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if math.isnan(x):
        return "NaN"
    text = format(float(x), FLOAT_FORMAT)
    # keep a decimal point so the value reparses as a float, not an int
    if "." not in text and "e" not in text and "E" not in text:
        text += ".0"
    return text


def dumps_canonical(obj, indent: int = 2) -> str:
    """Serialize with sorted keys and fixed float formatting."""
    out = io.StringIO()
    _write(obj, out, indent, 0)
    out.write("\n")
    return out.getvalue()


def _write(obj, out, indent, level):
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if obj is None:
        out.write("null")
    elif isinstance(obj, bool):
        out.write("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.write(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.write(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        keys = sorted(obj)
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise ConfigError(f"JSON object keys must be strings, got {key!r}")
            out.write(inner + json.dumps(key, ensure_ascii=False) + ": ")
            _write(obj[key], out, indent, level + 1)
            out.write(",\n" if i + 1 < len(keys) else "\n")
        out.write(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            out.write("[]")
            return
        # short scalar rows inline, anything nested one item per line
        if all(isinstance(x, (int, float, np.integer, np.floating)) for x in seq):
            out.write("[" + ", ".join(
                str(int(x)) if isinstance(x, (int, np.integer)) else _format_float(float(x))
                for x in seq) + "]")
            return
        out.write("[\n")
        for i, item in enumerate(seq):
            out.write(inner)
            _write(item, out, indent, level + 1)
            out.write(",\n" if i + 1 < len(seq) else "\n")
        out.write(pad + "]")
    else:
        raise ConfigError(f"cannot serialize value of type {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Matrices and vectors
# ---------------------------------------------------------------------------

def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(data) -> np.ndarray:
    try:
        dim = int(data["dim"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad matrix object: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ConfigError(
            f"matrix field shapes {re.shape}/{im.shape} do not match dim {dim}")
    return re + 1j * im


def vector_to_json(v) -> dict:
    v = np.asarray(v, dtype=np.complex128)
    return {"dim": int(v.shape[0]), "re": v.real.tolist(), "im": v.imag.tolist()}


def vector_from_json(data) -> np.ndarray:
    try:
        dim = int(data["dim"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad vector object: {exc}") from exc
    if re.shape != (dim,) or im.shape != (dim,):
        raise ConfigError(
            f"vector field shapes {re.shape}/{im.shape} do not match dim {dim}")
    return re + 1j * im


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_matrix(path: str) -> np.ndarray:
    return matrix_from_json(load_json(path))


def save_matrix(path: str, m) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(matrix_to_json(m)))


# ---------------------------------------------------------------------------
# Constraint trees
# ---------------------------------------------------------------------------

def _resolve(node, base_dir, parser, what):
    """Inline object, or "file:path" reference resolved against base_dir."""
    if isinstance(node, str):
        if not node.startswith("file:"):
            raise ConfigError(f"{what}: expected an object or file:path, got {node!r}")
        path = node.split(":", 1)[1]
        if base_dir is not None:
            path = os.path.join(base_dir, path)
        return parser(load_json(path))
    return parser(node)


def constraint_from_json(data, base_dir=None):
    """Build a constraint functional from its JSON description."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("constraint spec must be an object with a 'kind' field")
    kind = data["kind"]
    params = data.get("params", {})
    children = data.get("children", [])
    if kind in con.COMBINATOR_KINDS:
        if len(children) != 2:
            raise ConfigError(f"field 'children': {kind} needs exactly 2, got {len(children)}")
        built = tuple(constraint_from_json(c, base_dir) for c in children)
        if kind == "sum":
            return con.Sum(children=built)
        if kind == "max":
            return con.Max(children=built)
        if kind == "min":
            return con.Min(children=built)
        p = _parse_p(params, kind)
        if kind == "powmean":
            return con.PowerMean(p=p, children=built)
        return con.GeometricMean(p=p, children=built)
    if children:
        raise ConfigError(f"field 'children': atom {kind!r} takes none")
    if kind == "schatten":
        return con.Schatten(p=_parse_p(params, kind))
    if kind == "op_shifted":
        return con.SpectralRange()
    if kind == "ml":
        psi = _resolve(params.get("psi"), base_dir, vector_from_json, "params.psi")
        return con.GroundShiftedMoment(p=_parse_p(params, kind), psi=psi)
    if kind == "mt":
        psi = _resolve(params.get("psi"), base_dir, vector_from_json, "params.psi")
        return con.EnergyUncertainty(psi=psi)
    if kind == "randers":
        metric = _resolve(params.get("metric"), base_dir, matrix_from_json, "params.metric")
        oneform = _resolve(params.get("oneform"), base_dir, vector_from_json, "params.oneform")
        return con.Randers(metric=metric.real, oneform=oneform.real)
    raise ConfigError(f"field 'kind': unknown constraint {kind!r}")


def _parse_p(params, kind):
    if "p" not in params:
        raise ConfigError(f"field 'params.p': required for {kind}")
    p = params["p"]
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(f"field 'params.p': bad value {p!r}")
    return float(p)


def constraint_to_json(func) -> dict:
    """Inverse of constraint_from_json (file references are not reproduced)."""
    kind = func.kind
    if kind == "schatten":
        return {"kind": kind, "params": {"p": "inf" if math.isinf(func.p) else func.p}}
    if kind == "op_shifted":
        return {"kind": kind}
    if kind == "ml":
        return {"kind": kind, "params": {"p": func.p, "psi": vector_to_json(func.psi)}}
    if kind == "mt":
        return {"kind": kind, "params": {"psi": vector_to_json(func.psi)}}
    if kind == "randers":
        return {"kind": kind, "params": {"metric": matrix_to_json(func.metric),
                                         "oneform": vector_to_json(func.oneform)}}
    node: dict = {"kind": kind, "children": [constraint_to_json(c) for c in func.children]}
    if kind in ("powmean", "geomean"):
        node["params"] = {"p": func.p}
    return node


def parse_constraint_arg(arg: str, base_dir=None):
    """CLI helper: inline JSON if the argument starts with '{', else a path."""
    if arg.lstrip().startswith("{"):
        try:
            data = json.loads(arg)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"inline constraint:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        return constraint_from_json(data, base_dir)
    return constraint_from_json(load_json(arg), os.path.dirname(os.path.abspath(arg)))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def rows_to_csv(rows: list[dict]) -> str:
    """Render dict rows as CSV with full-precision floats."""
    if not rows:
        return ""
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return out.getvalue()


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _format_float(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        seq = v.tolist() if isinstance(v, np.ndarray) else v
        return " ".join(str(x) for x in seq)
    return v
