"""Chamber decomposition of the plane induced by a 2D framework.

The framework is first refined at its crossings; faces of the resulting
plane graph are traced with the usual "turn to the next edge clockwise"
rule, so every face lies to the left of its boundary half-edges.  Bounded
faces come out counter-clockwise; the outer boundary of each connected
component comes out with non-positive area and becomes a hole of whichever
face contains it.
"""
from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_TOL, Tolerances, as_vec
from .errors import DimensionError, PointOnFramework
from .framework import Edge, Framework, refine_crossings

UNBOUNDED = 0


@dataclass(frozen=True)
class Adjacency:
    """Chambers ``a`` and ``b`` separated by a sub-segment of original edge ``edge``.

    ``normal`` is the unit normal of the segment pointing from ``a`` to ``b``.
    """
    a: int
    b: int
    edge: Edge
    normal: np.ndarray
    segment: tuple  # (start point, end point) of the shared sub-segment

    def reversed(self) -> "Adjacency":
        return Adjacency(self.b, self.a, self.edge, -self.normal, self.segment)


@dataclass
class Chamber:
    id: int
    bounded: bool
    boundary: list = field(default_factory=list)  # outer boundary (CCW point array) if bounded
    holes: list = field(default_factory=list)  # inner boundary cycles
    area: float = math.inf
    sample: np.ndarray | None = None  # a point in the interior


def _signed_area(P: np.ndarray) -> float:
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _point_in_polygon(p, P: np.ndarray) -> bool:
    x, y = p
    Q = np.roll(P, -1, axis=0)
    y0, y1 = P[:, 1], Q[:, 1]
    straddle = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = P[:, 0] + (y - y0) * (Q[:, 0] - P[:, 0]) / (y1 - y0)
    return bool(np.count_nonzero(straddle & (xc > x)) % 2)


def _segment_distances(p, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Distances from ``p`` to the segments ``A[k] B[k]``."""
    D = B - A
    L2 = np.einsum("ij,ij->i", D, D)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(L2 > 0, np.einsum("ij,ij->i", p - A, D) / L2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.linalg.norm(A + t[:, None] * D - p, axis=1)


class ChamberComplex:
    """Chambers, their boundaries, and labelled adjacencies of a planar framework."""

    def __init__(self, framework: Framework, chambers: list[Chamber],
                 adjacencies: list[Adjacency], nodes: dict, subedges: list,
                 tol: Tolerances):
        self.framework = framework
        self.chambers = chambers
        self.adjacencies = adjacencies
        self.nodes = nodes
        self.subedges = subedges
        self.tol = tol
        self.unbounded_id = UNBOUNDED
        self._ends = None
        self._boxes = None

    def segment_ends(self) -> tuple[np.ndarray, np.ndarray]:
        if self._ends is None:
            A = np.array([self.nodes[se.u] for se in self.subedges]).reshape(-1, 2)
            B = np.array([self.nodes[se.v] for se in self.subedges]).reshape(-1, 2)
            self._ends = (A, B)
        return self._ends

    def bounded_by_area(self) -> tuple[list[Chamber], np.ndarray]:
        """Bounded chambers from smallest to largest, with their bounding boxes."""
        if self._boxes is None:
            chs = sorted((c for c in self.chambers if c.bounded), key=lambda c: c.area)
            boxes = np.array([[*c.boundary.min(axis=0), *c.boundary.max(axis=0)] for c in chs])
            self._boxes = (chs, boxes.reshape(-1, 4))
        return self._boxes

    def __len__(self):
        return len(self.chambers)

    @property
    def bounded_ids(self) -> list[int]:
        return [c.id for c in self.chambers if c.bounded]

    def neighbours(self) -> dict[int, list[Adjacency]]:
        """Adjacency lists in both directions, keyed by the source chamber."""
        out: dict[int, list[Adjacency]] = defaultdict(list)
        for adj in self.adjacencies:
            out[adj.a].append(adj)
            out[adj.b].append(adj.reversed())
        return out

    def is_connected(self) -> bool:
        nbrs = self.neighbours()
        seen = {UNBOUNDED}
        queue = deque([UNBOUNDED])
        while queue:
            c = queue.popleft()
            for adj in nbrs[c]:
                if adj.b not in seen:
                    seen.add(adj.b)
                    queue.append(adj.b)
        return len(seen) == len(self.chambers)

    def euler_characteristic(self) -> int:
        """V - E + F of the refined subdivision (F includes the unbounded face)."""
        used = {se.u for se in self.subedges} | {se.v for se in self.subedges}
        return len(used) - len(self.subedges) + len(self.chambers)

    def locate(self, point, tol: Tolerances | None = None) -> int:
        return locate_chamber(self, point, tol)


def locate_chamber(cc: ChamberComplex, point, tol: Tolerances | None = None) -> int:
    """Id of the chamber containing ``point`` (ray casting)."""
    tol = tol or cc.tol
    p = as_vec(point, 2)
    scale = max(1.0, float(np.abs(p).max()))
    A, B = cc.segment_ends()
    if len(A) and _segment_distances(p, A, B).min() <= tol.eps_geom * scale:
        raise PointOnFramework(f"point {tuple(p)} lies on the framework")
    chs, boxes = cc.bounded_by_area()
    hit = (boxes[:, 0] <= p[0]) & (p[0] <= boxes[:, 2]) & (boxes[:, 1] <= p[1]) & (p[1] <= boxes[:, 3])
    for k in np.nonzero(hit)[0]:
        # the smallest polygon around p is its chamber; larger ones only contain it as a hole
        if _point_in_polygon(p, chs[k].boundary):
            return chs[k].id
    return UNBOUNDED


def _interior_sample(cc: ChamberComplex, ch: Chamber) -> np.ndarray:
    P = ch.boundary
    c = P.mean(axis=0)
    try:
        if locate_chamber(cc, c) == ch.id:
            return c
    except PointOnFramework:
        pass
    # step off boundary edge midpoints towards the interior (left side)
    lengths = np.linalg.norm(np.roll(P, -1, axis=0) - P, axis=1)
    for k in np.argsort(-lengths):
        a, b = P[k], P[(k + 1) % len(P)]
        d = (b - a) / lengths[k]
        left = np.array([-d[1], d[0]])
        for h in (0.25, 0.1, 0.03, 0.01, 1e-3, 1e-4):
            q = 0.5 * (a + b) + h * lengths[k] * left
            try:
                if locate_chamber(cc, q) == ch.id:
                    return q
            except PointOnFramework:
                continue
    raise RuntimeError(f"could not find an interior point of chamber {ch.id}")


def _components(adj: dict) -> dict:
    comp: dict = {}
    for start in adj:
        if start in comp:
            continue
        comp[start] = start
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in comp:
                    comp[w] = start
                    stack.append(w)
    return comp


def build_chamber_complex(fw: Framework, tol: Tolerances = DEFAULT_TOL) -> ChamberComplex:
    if fw.dim != 2:
        raise DimensionError("chamber complexes are defined for frameworks in R^2")
    nodes, subedges = refine_crossings(fw, tol)

    # half-edges (u, v) -> index into subedges; outgoing lists sorted by angle
    half: dict[tuple, int] = {}
    out: dict[object, list] = defaultdict(list)
    for k, se in enumerate(subedges):
        half[(se.u, se.v)] = k
        half[(se.v, se.u)] = k
        out[se.u].append(se.v)
        out[se.v].append(se.u)
    position: dict[tuple, int] = {}
    for u, nbrs in out.items():
        pu = nodes[u]
        nbrs.sort(key=lambda w: math.atan2(nodes[w][1] - pu[1], nodes[w][0] - pu[0]))
        for idx, w in enumerate(nbrs):
            position[(u, w)] = idx

    def next_half(h):
        u, v = h
        lst = out[v]
        return (v, lst[(position[(v, u)] - 1) % len(lst)])

    # trace cycles; every half-edge belongs to exactly one
    cycle_of: dict[tuple, int] = {}
    cycles: list[list] = []
    for h in half:
        if h in cycle_of:
            continue
        cyc = []
        cur = h
        while cur not in cycle_of:
            cycle_of[cur] = len(cycles)
            cyc.append(cur)
            cur = next_half(cur)
        cycles.append(cyc)

    chambers: list[Chamber] = [Chamber(UNBOUNDED, bounded=False)]
    face_of_cycle: dict[int, int] = {}
    outer_cycles = []
    for ci, cyc in enumerate(cycles):
        P = np.array([nodes[u] for u, _ in cyc])
        A = _signed_area(P)
        # a cycle that walks every edge both ways bounds a tree: its area is roundoff
        tree = all(cycle_of[(v, u)] == ci for u, v in cyc)
        if A > 0 and not tree:
            cid = len(chambers)
            chambers.append(Chamber(cid, True, P, area=A))
            face_of_cycle[ci] = cid
        else:
            outer_cycles.append((ci, P))
    # attach each component's outer boundary to the smallest foreign face containing it
    comp = _components(out)
    bounded_cycles = list(face_of_cycle.items())
    for ci, P in outer_cycles:
        owner, best = UNBOUNDED, math.inf
        here = comp[cycles[ci][0][0]]
        for cj, cid in bounded_cycles:
            ch = chambers[cid]
            if (comp[cycles[cj][0][0]] != here and ch.area < best
                    and _point_in_polygon(P[0], ch.boundary)):
                owner, best = cid, ch.area
        face_of_cycle[ci] = owner
        chambers[owner].holes.append(P)

    adjacencies: list[Adjacency] = []
    for k, se in enumerate(subedges):
        left = face_of_cycle[cycle_of[(se.u, se.v)]]
        right = face_of_cycle[cycle_of[(se.v, se.u)]]
        if left == right:
            continue
        pu, pv = nodes[se.u], nodes[se.v]
        d = pv - pu
        d = d / np.linalg.norm(d)
        normal = np.array([d[1], -d[0]])  # points from the left face to the right face
        adjacencies.append(Adjacency(left, right, se.origin, normal, (pu.copy(), pv.copy())))

    cc = ChamberComplex(fw, chambers, adjacencies, nodes, subedges, tol)
    for ch in chambers:
        if ch.bounded:
            ch.sample = _interior_sample(cc, ch)
        else:
            pts = np.array(list(nodes.values())) if nodes else np.zeros((1, 2))
            ch.sample = pts.max(axis=0) + 1.0 + np.array([0.0, 0.37])
    return cc
