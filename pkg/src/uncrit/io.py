"""Deterministic readers and writers for grids, families, ensembles and results."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .analytic import AnalyticBranch, branch_probability
from .errors import InputError
from .extract import Extraction, UncertainCriticalPoint
from .family import LinearFamily, family_from_dict, family_to_dict
from .mesh import Grid, grid_from_dict, grid_to_dict
from .patches import SingularPatchGraph

__all__ = [
    "dumps",
    "write_json",
    "read_json",
    "read_grid",
    "write_grid",
    "read_family",
    "write_family",
    "read_ensemble",
    "write_ensemble_raw",
    "patch_graph_to_dict",
    "ucp_to_dict",
    "components_to_dict",
    "branches_to_dict",
    "write_csv",
    "density_rows",
]


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} cannot be written as JSON")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def _encode(obj, out: list[str]) -> None:
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for k, key in enumerate(sorted(obj, key=str)):
            if k:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for k, item in enumerate(obj):
            if k:
                out.append(", ")
            _encode(item, out)
        out.append("]")
    elif hasattr(obj, "value") and isinstance(obj.value, str):  # enums
        out.append(json.dumps(obj.value))
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON with sorted keys and 17-significant-digit floats, stable across runs."""
    out: list[str] = []
    _encode(obj, out)
    return "".join(out) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def read_grid(path) -> Grid:
    data = read_json(path)
    try:
        return grid_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: malformed grid ({exc})") from None


def write_grid(path, grid: Grid) -> None:
    write_json(path, grid_to_dict(grid))


def read_family(path) -> LinearFamily:
    data = read_json(path)
    try:
        return family_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: malformed family ({exc})") from None
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_family(path, family: LinearFamily) -> None:
    write_json(path, family_to_dict(family))


def read_ensemble(path) -> np.ndarray:
    """Members as rows. ``.csv`` text, or raw little-endian float64 described by
    a sibling ``<file>.json`` header ``{"rows": r, "cols": n}``."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"file not found: {path}")
    if path.suffix.lower() == ".csv":
        try:
            with path.open(newline="") as fh:
                rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from None
        if not rows or len({len(r) for r in rows}) != 1:
            raise InputError(f"{path}: ensemble rows must be non-empty and of equal length")
        X = np.array(rows)
    else:
        header = read_json(path.with_name(path.name + ".json"))
        try:
            r, n = int(header["rows"]), int(header["cols"])
        except (KeyError, ValueError, TypeError):
            raise InputError(f"{path}: header needs integer 'rows' and 'cols'") from None
        raw = np.fromfile(path, dtype="<f8")
        if raw.size != r * n:
            raise InputError(f"{path}: expected {r * n} float64 values, found {raw.size}")
        X = raw.reshape(r, n)
    if not np.all(np.isfinite(X)):
        raise InputError(f"{path}: ensemble contains non-finite values")
    return X


def write_ensemble_raw(path, X: np.ndarray) -> None:
    path = Path(path)
    X = np.asarray(X, dtype="<f8")
    X.tofile(path)
    write_json(path.with_name(path.name + ".json"), {"rows": X.shape[0], "cols": X.shape[1]})


def patch_graph_to_dict(graph: SingularPatchGraph) -> dict:
    return {
        "include_boundary": graph.include_boundary,
        "nodes": [
            {"id": k, "vertex": p.vertex, "type": p.ctype.tag.value, "multiplicity": p.ctype.multiplicity,
             "sign_vector": list(p.sign_vector), "witness": [float(w) for w in p.witness]}
            for k, p in enumerate(graph.nodes)
        ],
        "edges": [
            {"a": e.a, "b": e.b, "same_type": e.same_type,
             "shared_constraints": [list(s) for s in e.shared_constraints]}
            for e in graph.edges
        ],
    }


def ucp_to_dict(ucp: UncertainCriticalPoint) -> dict:
    sup = ucp.support
    support = {"intervals": [list(s) for s in sup.intervals]} if sup.dim == 1 else {"polygons": sup.polygons()}
    support["measure"] = sup.measure
    return {
        "id": ucp.id,
        "type": ucp.ctype.value,
        "multiplicity_max": ucp.multiplicity_max,
        "patches": list(ucp.patch_ids),
        "vertices": list(ucp.vertex_set),
        "connectors": [list(s) for s in ucp.connector_segments],
        "support": support,
    }


def components_to_dict(extraction: Extraction) -> dict:
    return {"components": [ucp_to_dict(u) for u in extraction.ucps]}


def branches_to_dict(branches: list[AnalyticBranch], dist=None) -> dict:
    return {"branches": [
        {"interval": [b.lo, b.hi], "type": b.ctype.value,
         "breakpoints": [b.kind_lo.value, b.kind_hi.value],
         "probability": branch_probability(b, dist)}
        for b in branches
    ]}


def write_csv(path, header: list[str], rows) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(float(v), ".17g") if isinstance(v, (float, np.floating)) else v for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def density_rows(grid: Grid, ucp_id: int, values: np.ndarray):
    for v in range(grid.n):
        yield [ucp_id, v, *(float(c) for c in grid.vertices[v]), float(values[v])]
