"""JSON input and output for polytopes, measures and tab-separated data."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .errors import MalformedInput
from .geometry import Polytope, build_from_halfspaces, build_from_vertices
from .measure import ConeVolumeMeasure


def _numbers(value, where, path, length=None):
    if not isinstance(value, list) or not value:
        raise MalformedInput("expected a non-empty list of numbers", path, where)
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise MalformedInput(f"expected a finite number, got {x!r}", path, f"{where}[{i}]")
    if length is not None and len(value) != length:
        raise MalformedInput(f"expected {length} coordinates, got {len(value)}", path, where)
    return [float(x) for x in value]


def _number(value, where, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise MalformedInput(f"expected a finite number, got {value!r}", path, where)
    return float(value)


def _dim(data, path):
    if "dim" not in data:
        return None
    d = data["dim"]
    if isinstance(d, bool) or not isinstance(d, int):
        raise MalformedInput(f"expected an integer, got {d!r}", path, "$.dim")
    return d


def polytope_from_dict(data, path=None, tol: float | None = None, cap: int | None = None) -> Polytope:
    """Accepts {"dim", "vertices"} or {"halfspaces": [{"normal", "offset"}]}."""
    if not isinstance(data, dict):
        raise MalformedInput("expected a JSON object", path, "$")
    kw = {k: v for k, v in (("tol", tol), ("cap", cap)) if v is not None}
    n = _dim(data, path)
    if "vertices" in data:
        pts = data["vertices"]
        if not isinstance(pts, list) or not pts:
            raise MalformedInput("expected a non-empty list of points", path, "$.vertices")
        n = n or (len(pts[0]) if isinstance(pts[0], list) else None)
        rows = [_numbers(p, f"$.vertices[{i}]", path, n) for i, p in enumerate(pts)]
        return build_from_vertices(rows, **kw)
    if "halfspaces" in data:
        hs = data["halfspaces"]
        if not isinstance(hs, list) or not hs:
            raise MalformedInput("expected a non-empty list of halfspaces", path, "$.halfspaces")
        normals, offsets = [], []
        for i, h in enumerate(hs):
            where = f"$.halfspaces[{i}]"
            if not isinstance(h, dict) or "normal" not in h or "offset" not in h:
                raise MalformedInput('expected {"normal": [...], "offset": number}', path, where)
            n = n or (len(h["normal"]) if isinstance(h["normal"], list) else None)
            normals.append(_numbers(h["normal"], where + ".normal", path, n))
            offsets.append(_number(h["offset"], where + ".offset", path))
        return build_from_halfspaces(normals, offsets, **kw)
    raise MalformedInput('needs a "vertices" or "halfspaces" field', path, "$")


def measure_from_dict(data, path=None) -> ConeVolumeMeasure:
    n = _dim(data, path)
    atoms = data.get("atoms")
    if n is None:
        raise MalformedInput('measure needs an integer "dim"', path, "$")
    if not isinstance(atoms, list) or not atoms:
        raise MalformedInput("expected a non-empty list of atoms", path, "$.atoms")
    normals, weights = [], []
    for i, a in enumerate(atoms):
        where = f"$.atoms[{i}]"
        if not isinstance(a, dict) or "normal" not in a or "weight" not in a:
            raise MalformedInput('expected {"normal": [...], "weight": number}', path, where)
        normals.append(_numbers(a["normal"], where + ".normal", path, n))
        w = _number(a["weight"], where + ".weight", path)
        if w <= 0:
            raise MalformedInput("atom weights must be positive", path, where + ".weight")
        weights.append(w)
    return ConeVolumeMeasure(n, normals, weights)


def read_json(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise MalformedInput(exc.strerror or str(exc), str(p)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}",
                             str(p)) from exc


def load_input(path, tol: float | None = None, cap: int | None = None):
    """A Polytope, or a ConeVolumeMeasure when the file holds "atoms"."""
    data = read_json(path)
    if isinstance(data, dict) and "atoms" in data:
        return measure_from_dict(data, str(path))
    return polytope_from_dict(data, str(path), tol, cap)


def load_polytope(path, tol: float | None = None, cap: int | None = None) -> Polytope:
    return polytope_from_dict(read_json(path), str(path), tol, cap)


def polytope_to_dict(P: Polytope) -> dict:
    return {
        "dim": P.dim,
        "vertices": P.vertices.tolist(),
        "halfspaces": [{"normal": f.normal.tolist(), "offset": f.offset} for f in P.facets],
    }


def write_tsv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows([repr(float(x)) if isinstance(x, float) else x for x in r] for r in rows)
