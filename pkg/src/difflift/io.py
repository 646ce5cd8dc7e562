"""JSON documents for frameworks, complexes and paths; OBJ and SVG export."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import jsonschema
import numpy as np

from .arrangement import ChamberComplex, UNBOUNDED
from .core import DEFAULT_TOL, Tolerances
from .errors import LiftingError, SchemaError
from .framework import Framework, Stress
from .lifting2d import DifferentialLifting2D, PolyhedralLifting
from .polytopal import ForceLoad, PolytopalComplex

_ID = {"type": ["integer", "string"]}
_COORDS = {"type": "array", "items": {"type": "number"}, "minItems": 1}

FRAMEWORK_SCHEMA = {
    "type": "object",
    "required": ["dim", "vertices", "edges"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "vertices": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "required": ["id", "coords"],
                      "properties": {"id": _ID, "coords": _COORDS},
                      "additionalProperties": False},
        },
        "edges": {
            "type": "array",
            "items": {"type": "object", "required": ["i", "j"],
                      "properties": {"i": _ID, "j": _ID, "stress": {"type": "number"}},
                      "additionalProperties": False},
        },
        "metadata": {"type": "object"},
    },
    "additionalProperties": False,
}

COMPLEX_SCHEMA = {
    "type": "object",
    "required": ["face_dim", "ambient_dim", "vertices", "cells"],
    "properties": {
        "face_dim": {"type": "integer", "minimum": 1},
        "ambient_dim": {"type": "integer", "minimum": 2},
        "vertices": {"type": "array", "minItems": 1, "items": _COORDS},
        "cells": {"type": "array", "minItems": 1,
                  "items": {"type": "array", "items": {"type": "integer", "minimum": 0},
                            "minItems": 2}},
        "force_load": {"type": "array", "items": {"type": "number"}},
        "metadata": {"type": "object"},
    },
    "additionalProperties": False,
}

PATH_SCHEMA = {
    "type": "object",
    "required": ["samples"],
    "properties": {
        "samples": {"type": "array", "minItems": 2,
                    "items": {"type": "array", "minItems": 1, "items": _COORDS}},
        "metadata": {"type": "object"},
    },
    "additionalProperties": False,
}


def _load(text: str, schema: dict, what: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{what}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{what}: {where}: {exc.message}") from exc
    return doc


def _edge_lines(text: str) -> list[int]:
    """Best-effort 1-based line numbers of the objects inside the "edges" array."""
    start = text.find('"edges"')
    if start < 0:
        return []
    lines, depth, k = [], 0, text.find("[", start)
    for pos in range(k + 1, len(text)):
        ch = text[pos]
        if ch == "{":
            if depth == 0:
                lines.append(text.count("\n", 0, pos) + 1)
            depth += 1
        elif ch == "}":
            depth -= 1
        elif ch == "]" and depth == 0:
            break
    return lines


@dataclass
class FrameworkDoc:
    framework: Framework
    stress: Stress | None = None
    metadata: dict = field(default_factory=dict)


def parse_framework_doc(text: str, tol: Tolerances = DEFAULT_TOL) -> FrameworkDoc:
    doc = _load(text, FRAMEWORK_SCHEMA, "framework")
    dim = doc["dim"]
    lines = _edge_lines(text)

    def at(k):
        return f" (edges[{k}], line {lines[k]})" if k < len(lines) else f" (edges[{k}])"

    vertices = {}
    for k, v in enumerate(doc["vertices"]):
        if v["id"] in vertices:
            raise SchemaError(f"duplicate vertex id {v['id']!r} (vertices[{k}])")
        if len(v["coords"]) != dim:
            raise SchemaError(f"vertex {v['id']!r} has {len(v['coords'])} coordinates, expected {dim}")
        vertices[v["id"]] = v["coords"]
    edges, stresses, seen = [], {}, set()
    for k, e in enumerate(doc["edges"]):
        i, j = e["i"], e["j"]
        if i == j:
            raise SchemaError(f"loop edge at vertex {i!r}{at(k)}")
        for v in (i, j):
            if v not in vertices:
                raise SchemaError(f"edge references unknown vertex {v!r}{at(k)}")
        key = frozenset((i, j))
        if key in seen:
            raise SchemaError(f"duplicate edge {i!r}-{j!r}{at(k)}")
        seen.add(key)
        edges.append((i, j))
        if "stress" in e:
            stresses[(i, j)] = float(e["stress"])
    if stresses and len(stresses) != len(edges):
        raise SchemaError("stress must be given on every edge or on none")
    try:
        fw = Framework(vertices, edges, dim=dim, tol=tol)
    except LiftingError as exc:
        raise SchemaError(f"framework: {exc}") from exc
    return FrameworkDoc(fw, Stress(stresses) if stresses else None, dict(doc.get("metadata", {})))


def parse_framework(text: str, tol: Tolerances = DEFAULT_TOL) -> tuple[Framework, Stress | None]:
    d = parse_framework_doc(text, tol)
    return d.framework, d.stress


def serialize_framework(fw: Framework, s: Stress | None = None, metadata: dict | None = None) -> str:
    doc: dict[str, Any] = {
        "dim": fw.dim,
        "vertices": [{"id": v, "coords": [float(c) for c in p]} for v, p in fw.vertices.items()],
        "edges": [],
    }
    for i, j in fw.edges:
        e: dict[str, Any] = {"i": i, "j": j}
        if s is not None:
            e["stress"] = float(s.get((i, j)))
        doc["edges"].append(e)
    if metadata:
        doc["metadata"] = metadata
    return json.dumps(doc, indent=2)


def parse_complex(text: str, tol: Tolerances = DEFAULT_TOL,
                  validate: bool = True) -> tuple[PolytopalComplex, ForceLoad | None]:
    doc = _load(text, COMPLEX_SCHEMA, "complex")
    n = doc["ambient_dim"]
    if any(len(v) != n for v in doc["vertices"]):
        raise SchemaError(f"every vertex needs {n} coordinates")
    try:
        c = PolytopalComplex(doc["vertices"], doc["cells"], doc["face_dim"], tol, validate=validate)
    except LiftingError as exc:
        raise SchemaError(f"complex: {exc}") from exc
    w = None
    if "force_load" in doc:
        if len(doc["force_load"]) != len(c.cells):
            raise SchemaError("force_load needs one value per cell")
        w = ForceLoad(doc["force_load"])
    return c, w


def serialize_complex(c: PolytopalComplex, w: ForceLoad | None = None,
                      metadata: dict | None = None) -> str:
    doc: dict[str, Any] = {
        "face_dim": c.face_dim,
        "ambient_dim": c.ambient_dim,
        "vertices": [[float(x) for x in p] for p in c.vertices],
        "cells": [list(cell) for cell in c.cells],
    }
    if w is not None:
        doc["force_load"] = list(w.values)
    if metadata:
        doc["metadata"] = metadata
    return json.dumps(doc, indent=2)


def parse_path(text: str):
    from .grassmann import GrassmannPath

    doc = _load(text, PATH_SCHEMA, "path")
    try:
        return GrassmannPath([np.asarray(s, dtype=float) for s in doc["samples"]])
    except (LiftingError, ValueError) as exc:
        raise SchemaError(f"path: {exc}") from exc


def serialize_path(path) -> str:
    return json.dumps({"samples": [s.points.tolist() for s in path.samples]}, indent=2)


# -- OBJ -------------------------------------------------------------------------

def _is_convex(P: np.ndarray) -> bool:
    a = P - np.roll(P, 1, axis=0)
    b = np.roll(P, -1, axis=0) - P
    return bool(np.all(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0] > 0))


def _triangles(boundary: np.ndarray, holes: list) -> list[np.ndarray]:
    """Fan triangles for convex hole-free chambers, constrained Delaunay otherwise."""
    if not holes and _is_convex(boundary):
        return [np.array([boundary[0], boundary[k], boundary[k + 1]])
                for k in range(1, len(boundary) - 1)]
    from shapely import constrained_delaunay_triangles
    from shapely.geometry import Polygon

    poly = Polygon(boundary, [h for h in holes])
    tris = constrained_delaunay_triangles(poly)
    out = []
    for g in tris.geoms:
        T = np.asarray(g.exterior.coords)[:3]
        # keep counter-clockwise orientation
        d = (T[1, 0] - T[0, 0]) * (T[2, 1] - T[0, 1]) - (T[1, 1] - T[0, 1]) * (T[2, 0] - T[0, 0])
        out.append(T if d > 0 else T[::-1])
    return out


def export_obj(pl: PolyhedralLifting, cc: ChamberComplex | None = None) -> str:
    """Triangulated bounded chambers at the height of the lifting; shared vertices merged."""
    cc = cc or pl.complex
    verts: list[str] = []
    index: dict[str, int] = {}

    def vid(p3):
        # points that print identically at 9 decimals (the eps_geom scale) are one vertex
        key = " ".join(f"{c + 0.0:.9f}" for c in p3).replace("-0.000000000", "0.000000000")
        if key not in index:
            index[key] = len(verts) + 1
            verts.append(key)
        return index[key]

    faces = []
    for ch in cc.chambers:
        if not ch.bounded:
            continue
        for T in _triangles(np.asarray(ch.boundary), [np.asarray(h) for h in ch.holes]):
            ids = [vid((x, y, pl.height_on(ch.id, (x, y)))) for x, y in T]
            faces.append((ch.id, ids))
    lines = ["# piecewise-linear lifting, one group per bounded chamber"]
    for key in verts:
        lines.append("v " + key)
    current = None
    for cid, ids in faces:
        if cid != current:
            lines.append(f"g chamber_{cid}")
            current = cid
        lines.append("f " + " ".join(str(i) for i in ids))
    return "\n".join(lines) + "\n"


def parse_obj(text: str) -> tuple[np.ndarray, list[list[int]]]:
    """Vertices and 0-based faces of an OBJ text (v/f records only)."""
    verts, faces = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(x.split("/")[0]) - 1 for x in parts[1:]])
    return np.array(verts).reshape(-1, 3), faces


# -- SVG -------------------------------------------------------------------------

def export_svg(dl: DifferentialLifting2D, size: int = 480, margin: int = 40) -> str:
    """Chamber complex with one boxed label per chamber showing its 1-form."""
    cc = dl.complex
    pts = np.array(list(cc.nodes.values()))
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    k = (size - 2 * margin) / span

    def xy(p):
        return margin + k * (p[0] - lo[0]), size - margin - k * (p[1] - lo[1])

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size + 40}" '
           f'viewBox="0 0 {size} {size + 40}">',
           '<rect width="100%" height="100%" fill="white"/>']
    for ch in cc.chambers:
        if ch.bounded:
            path = " ".join("{:.3f},{:.3f}".format(*xy(p)) for p in ch.boundary)
            out.append(f'<polygon points="{path}" fill="#eef3fb" stroke="none"/>')
    for se in cc.subedges:
        (x0, y0), (x1, y1) = xy(cc.nodes[se.u]), xy(cc.nodes[se.v])
        out.append(f'<line x1="{x0:.3f}" y1="{y0:.3f}" x2="{x1:.3f}" y2="{y1:.3f}" '
                   'stroke="black" stroke-width="1.5"/>')
    for v, p in cc.framework.vertices.items():
        x, y = xy(p)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="black"/>')
        out.append(f'<text x="{x + 5:.3f}" y="{y - 5:.3f}" font-size="11" font-family="sans-serif">'
                   f'{_esc(v)}</text>')
    for ch in cc.chambers:
        label = f"C{ch.id}: {dl.forms[ch.id]}" if ch.id != UNBOUNDED else f"C∞: {dl.forms[ch.id]}"
        if ch.bounded:
            x, y = xy(ch.sample)
        else:
            x, y = margin, size + 20
        w = 6.2 * len(label) + 8
        out.append(f'<rect x="{x - w / 2:.3f}" y="{y - 11:.3f}" width="{w:.3f}" height="16" '
                   'fill="white" stroke="#335" stroke-width="0.8"/>')
        out.append(f'<text x="{x:.3f}" y="{y + 1:.3f}" font-size="11" font-family="monospace" '
                   f'text-anchor="middle">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(x) -> str:
    return str(x).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
