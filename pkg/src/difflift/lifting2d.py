"""Differential liftings of planar frameworks and classical Maxwell liftings.

Conventions
-----------
Crossing from chamber ``a`` to chamber ``b`` over edge ``p_i p_j`` changes the
form by ``sign(det(n_ab, p_i - p_j)) * w_ij * d(p_i - p_j)``.

The polyhedral lifting has gradient ``*alpha_C`` on chamber ``C`` (sign
``+1``).  With ``perp`` the counter-clockwise quarter turn this gives, on
every edge, ``nu_right - nu_left = w_ij * perp(p_j - p_i)`` where left/right
are taken with respect to the direction ``p_i -> p_j`` and the normals are
scaled to ``(*, *, -1)``.  Flipping the sign gives the lifting of ``-w``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .arrangement import Adjacency, ChamberComplex, build_chamber_complex, UNBOUNDED
from .core import DEFAULT_TOL, MForm, Tolerances, covector, hodge_star
from .errors import (ConsistencyError, ContinuityError, DegenerateDual, InvalidFramework,
                     NotPlanar)
from .framework import Framework, Stress, _check_keys, require_self_stress

GRADIENT_SIGN = 1.0


def _perp(v) -> np.ndarray:
    return np.array([-v[1], v[0]])


def jump_form(fw: Framework, s: Stress, adj: Adjacency) -> MForm:
    """Right-hand side of the neighbouring condition for crossing ``adj`` from a to b."""
    i, j = adj.edge
    d = fw.edge_vector(i, j)
    side = float(np.sign(adj.normal[0] * d[1] - adj.normal[1] * d[0]))
    return covector(side * s.get((i, j)) * d)


@dataclass
class DifferentialLifting2D:
    complex: ChamberComplex
    forms: dict[int, MForm] = field(default_factory=dict)

    def __getitem__(self, chamber_id: int) -> MForm:
        return self.forms[chamber_id]

    def at(self, point) -> MForm:
        """Form of the chamber containing ``point``."""
        return self.forms[self.complex.locate(point)]


def differential_lifting_2d(fw: Framework, s: Stress, tol: Tolerances = DEFAULT_TOL,
                            cc: ChamberComplex | None = None,
                            check_equilibrium: bool = True) -> DifferentialLifting2D:
    """Propagate forms outward from the unbounded chamber and re-check every adjacency."""
    _check_keys(fw, s)
    if check_equilibrium:
        require_self_stress(fw, s, tol)
    cc = cc or build_chamber_complex(fw, tol)
    nbrs = cc.neighbours()
    forms = {UNBOUNDED: MForm.zero(2, 1)}
    queue = deque([UNBOUNDED])
    while queue:
        c = queue.popleft()
        for adj in nbrs[c]:
            if adj.b not in forms:
                forms[adj.b] = forms[c] + jump_form(fw, s, adj)
                queue.append(adj.b)
    if len(forms) != len(cc.chambers):
        raise ConsistencyError("chamber adjacency graph is not connected")
    scale = max(1.0, s.max_abs() * fw.scale())
    for adj in cc.adjacencies:
        gap = forms[adj.b] - forms[adj.a] - jump_form(fw, s, adj)
        if not gap.is_zero(tol.eps_form * scale):
            raise ConsistencyError(
                f"neighbouring condition fails between chambers {adj.a} and {adj.b} "
                f"across {adj.edge!r} (gap {gap.norm():.3g})")
    return DifferentialLifting2D(cc, forms)


def recover_stress(fw: Framework, dl: DifferentialLifting2D,
                   tol: Tolerances = DEFAULT_TOL) -> Stress:
    """Read each stress coefficient back from the jumps of the lifting."""
    readings: dict = {e: [] for e in fw.edges}
    for adj in dl.complex.adjacencies:
        i, j = adj.edge
        d = fw.edge_vector(i, j)
        side = float(np.sign(adj.normal[0] * d[1] - adj.normal[1] * d[0]))
        jump = (dl.forms[adj.b] - dl.forms[adj.a]).vector()
        w = side * float(jump @ d) / float(d @ d)
        if np.linalg.norm(jump - side * w * d) > tol.eps_form * max(1.0, np.linalg.norm(jump)):
            raise ConsistencyError(f"jump across {adj.edge!r} is not parallel to the edge")
        readings[adj.edge].append(w)
    out = {}
    for e, ws in readings.items():
        if not ws:
            out[e] = 0.0  # bridges carry no stress
            continue
        if max(ws) - min(ws) > tol.eps_form * max(1.0, max(abs(w) for w in ws)):
            raise ConsistencyError(f"inconsistent stress readings on {e!r}: {ws}")
        out[e] = float(np.mean(ws))
    return Stress(out)


@dataclass
class PolyhedralLifting:
    """Continuous piecewise-affine ``L(x) = <gradient_C, x> + offset_C``."""
    complex: ChamberComplex
    pieces: dict[int, tuple[np.ndarray, float]]
    normals: dict[int, np.ndarray]
    max_mismatch: float = 0.0

    def height(self, point) -> float:
        g, c = self.pieces[self.complex.locate(point)]
        return float(g @ np.asarray(point, dtype=float) + c)

    def height_on(self, chamber_id: int, point) -> float:
        g, c = self.pieces[chamber_id]
        return float(g @ np.asarray(point, dtype=float) + c)


def _check_points(adj: Adjacency):
    p, q = adj.segment
    return (p + (q - p) / 3.0, p + 2.0 * (q - p) / 3.0)


def integrate_polyhedral_lifting(fw: Framework, s: Stress, tol: Tolerances = DEFAULT_TOL,
                                 dl: DifferentialLifting2D | None = None) -> PolyhedralLifting:
    """Integrate the differential lifting of a crossing-free framework."""
    cc = dl.complex if dl is not None else build_chamber_complex(fw, tol)
    if len(cc.subedges) != len(fw.edges):
        raise NotPlanar("framework has crossing edges; no polyhedral lifting exists")
    if dl is None:
        dl = differential_lifting_2d(fw, s, tol, cc=cc)
    grads = {c: GRADIENT_SIGN * hodge_star(f).vector() for c, f in dl.forms.items()}
    offsets = {UNBOUNDED: 0.0}
    nbrs = cc.neighbours()
    queue = deque([UNBOUNDED])
    while queue:
        c = queue.popleft()
        for adj in nbrs[c]:
            if adj.b in offsets:
                continue
            mid = 0.5 * (adj.segment[0] + adj.segment[1])
            offsets[adj.b] = float(grads[c] @ mid + offsets[c] - grads[adj.b] @ mid)
            queue.append(adj.b)
    scale = max(1.0, s.max_abs() * fw.scale() * fw.scale())
    worst = 0.0
    for adj in cc.adjacencies:
        for x in _check_points(adj):
            ha = grads[adj.a] @ x + offsets[adj.a]
            hb = grads[adj.b] @ x + offsets[adj.b]
            worst = max(worst, abs(float(ha - hb)))
    if worst > tol.eps_form * scale:
        raise ContinuityError(f"lifting is discontinuous (mismatch {worst:.3g})")
    pieces = {c: (grads[c], offsets[c]) for c in grads}
    normals = {c: np.array([g[0], g[1], -1.0]) for c, g in grads.items()}
    return PolyhedralLifting(cc, pieces, normals, worst)


def normal_jump_residual(fw: Framework, s: Stress, pl: PolyhedralLifting) -> float:
    """Max over adjacencies of |(nu_right - nu_left) - w_ij perp(p_j - p_i)|."""
    worst = 0.0
    for adj in pl.complex.adjacencies:
        i, j = adj.edge
        pi, pj = fw.point(i), fw.point(j)
        # adj.normal points a -> b; b is on the right of i -> j when det(normal, pj - pi) > 0
        d = pj - pi
        right_is_b = adj.normal[0] * d[1] - adj.normal[1] * d[0] > 0
        left, right = (adj.a, adj.b) if right_is_b else (adj.b, adj.a)
        jump = pl.normals[right] - pl.normals[left]
        expected = np.append(s.get((i, j)) * _perp(d), 0.0)
        worst = max(worst, float(np.linalg.norm(jump - expected)))
    return worst


def reciprocal_diagram(fw: Framework, s: Stress, perpendicular: bool = False,
                       tol: Tolerances = DEFAULT_TOL,
                       dl: DifferentialLifting2D | None = None) -> Framework:
    """Maxwell reciprocal: one vertex per chamber, one edge per primal edge.

    Dual vertex of chamber C sits at the coefficients of ``alpha_C``, or of
    ``*alpha_C`` in perpendicular mode; dual edge lengths are ``|w_ij| |p_i - p_j|``.
    """
    cc = dl.complex if dl is not None else build_chamber_complex(fw, tol)
    if len(cc.subedges) != len(fw.edges):
        raise NotPlanar("reciprocal diagrams need a crossing-free framework")
    if dl is None:
        dl = differential_lifting_2d(fw, s, tol, cc=cc)
    by_edge = {adj.edge: adj for adj in cc.adjacencies}
    for e in fw.edges:
        if e not in by_edge and abs(s.get(e)) > tol.eps_form:
            raise InvalidFramework(f"bridge edge {e!r} carries non-zero stress")
    place = hodge_star if perpendicular else (lambda f: f)
    pts = {c: place(f).vector() for c, f in dl.forms.items()}
    dual_edges = []
    seen = set()
    for adj in cc.adjacencies:
        key = frozenset((adj.a, adj.b))
        if key not in seen:
            seen.add(key)
            dual_edges.append((adj.a, adj.b))
    try:
        return Framework(pts, dual_edges, dim=2, tol=tol)
    except InvalidFramework as exc:
        raise DegenerateDual(f"reciprocal placement is not injective: {exc}") from exc
