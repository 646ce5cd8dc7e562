"""Frameworks G(p) in R^n, stresses, equilibrium and self-stress spaces."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping

import numpy as np

from .core import DEFAULT_TOL, Tolerances, as_vec
from .errors import CollinearOverlap, DimensionError, InvalidFramework, NotSelfStress

VertexId = Hashable
Edge = tuple


def _order(v):
    # ints sort before strings; ids of one kind compare naturally
    return (isinstance(v, str), v)


def edge_key(i, j) -> Edge:
    """Canonical (unordered) key of the edge ij."""
    if i == j:
        raise InvalidFramework(f"loop edge at vertex {i!r}")
    return (i, j) if _order(i) <= _order(j) else (j, i)


class Framework:
    """A graph with an injective placement of its vertices in R^n."""

    def __init__(self, vertices: Mapping, edges: Iterable, dim: int | None = None,
                 tol: Tolerances = DEFAULT_TOL):
        pts = {vid: as_vec(p) for vid, p in dict(vertices).items()}
        if dim is None:
            if not pts:
                raise InvalidFramework("cannot infer dimension of an empty framework")
            dim = next(iter(pts.values())).size
        if dim < 1:
            raise DimensionError("dimension must be positive")
        for vid, p in pts.items():
            if p.size != dim:
                raise DimensionError(f"vertex {vid!r} is not in R^{dim}")
        self.dim = int(dim)
        self.vertices: dict = pts
        keys: list[Edge] = []
        seen = set()
        for e in edges:
            i, j = e
            k = edge_key(i, j)
            if k in seen:
                raise InvalidFramework(f"duplicate edge {k!r}")
            for v in k:
                if v not in pts:
                    raise InvalidFramework(f"edge {k!r} references unknown vertex {v!r}")
            seen.add(k)
            keys.append(k)
        self.edges: tuple[Edge, ...] = tuple(keys)
        self._edge_set = frozenset(keys)
        self._check_injective(tol.eps_geom)

    def _check_injective(self, eps):
        ids = list(self.vertices)
        if len(ids) < 2:
            return
        P = np.array([self.vertices[v] for v in ids])
        scale = max(1.0, float(np.abs(P).max()))
        # sort along a generic direction so only near neighbours are compared
        order = np.argsort(P @ np.linspace(1.0, 1.7, self.dim))
        proj = (P @ np.linspace(1.0, 1.7, self.dim))[order]
        for a in range(len(order)):
            b = a + 1
            while b < len(order) and proj[b] - proj[a] <= 3 * eps * scale:
                if np.linalg.norm(P[order[a]] - P[order[b]]) <= eps * scale:
                    raise InvalidFramework(
                        f"vertices {ids[order[a]]!r} and {ids[order[b]]!r} coincide")
                b += 1

    # -- queries ----------------------------------------------------------
    def point(self, v) -> np.ndarray:
        return self.vertices[v]

    def has_edge(self, i, j) -> bool:
        return i != j and edge_key(i, j) in self._edge_set

    def neighbours(self, v) -> list:
        return [j if i == v else i for i, j in self.edges if v in (i, j)]

    def edge_vector(self, i, j) -> np.ndarray:
        """p_i - p_j."""
        return self.vertices[i] - self.vertices[j]

    def scale(self) -> float:
        if not self.edges:
            return 1.0
        return max(float(np.linalg.norm(self.edge_vector(i, j))) for i, j in self.edges)

    def __eq__(self, other):
        if not isinstance(other, Framework):
            return NotImplemented
        return (self.dim == other.dim and self._edge_set == other._edge_set
                and self.vertices.keys() == other.vertices.keys()
                and all(np.array_equal(p, other.vertices[v]) for v, p in self.vertices.items()))

    def __repr__(self):
        return f"Framework(dim={self.dim}, |V|={len(self.vertices)}, |E|={len(self.edges)})"


class Stress(Mapping):
    """Stress coefficients on unordered edges; ``s[i, j] == s[j, i]``."""

    def __init__(self, values: Mapping | Iterable = ()):
        items = values.items() if isinstance(values, Mapping) else values
        self._values: dict[Edge, float] = {}
        for (i, j), w in items:
            self._values[edge_key(i, j)] = float(w)

    def __getitem__(self, key) -> float:
        i, j = key
        return self._values[edge_key(i, j)]

    def get(self, key, default=0.0):
        try:
            return self[key]
        except KeyError:
            return default

    def __iter__(self) -> Iterator[Edge]:
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def __add__(self, other: "Stress") -> "Stress":
        keys = set(self) | set(other)
        return Stress({k: self.get(k) + other.get(k) for k in keys})

    def __mul__(self, c: float) -> "Stress":
        return Stress({k: c * w for k, w in self._values.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def max_abs(self) -> float:
        return max((abs(w) for w in self._values.values()), default=0.0)

    def as_vector(self, fw: Framework) -> np.ndarray:
        return np.array([self.get(e) for e in fw.edges])

    @classmethod
    def from_vector(cls, fw: Framework, x) -> "Stress":
        return cls(dict(zip(fw.edges, map(float, x))))

    def __repr__(self):
        return f"Stress({self._values!r})"


def _check_keys(fw: Framework, s: Stress):
    for k in s:
        if not fw.has_edge(*k):
            raise InvalidFramework(f"stress given on non-edge {k!r}")


def equilibrium_residuals(fw: Framework, s: Stress) -> dict:
    """Per-vertex force sum ``sum_j w_ij (p_i - p_j)``."""
    _check_keys(fw, s)
    res = {v: np.zeros(fw.dim) for v in fw.vertices}
    for (i, j) in fw.edges:
        w = s.get((i, j))
        if w:
            d = fw.edge_vector(i, j)
            res[i] += w * d
            res[j] -= w * d
    return res


def equilibrium_error(fw: Framework, s: Stress) -> float:
    res = equilibrium_residuals(fw, s)
    return max((float(np.linalg.norm(r)) for r in res.values()), default=0.0)


def is_self_stress(fw: Framework, s: Stress, tol: Tolerances = DEFAULT_TOL) -> bool:
    scale = max(1.0, s.max_abs() * fw.scale())
    return equilibrium_error(fw, s) <= tol.eps_geom * scale * 10


def require_self_stress(fw: Framework, s: Stress, tol: Tolerances = DEFAULT_TOL):
    if not is_self_stress(fw, s, tol):
        raise NotSelfStress(
            f"equilibrium violated (max residual {equilibrium_error(fw, s):.3g})")


def equilibrium_matrix(fw: Framework) -> np.ndarray:
    """(n|V|) x |E| matrix; column ij holds p_i - p_j in block i and p_j - p_i in block j."""
    index = {v: k for k, v in enumerate(fw.vertices)}
    n = fw.dim
    A = np.zeros((n * len(index), len(fw.edges)))
    for col, (i, j) in enumerate(fw.edges):
        d = fw.edge_vector(i, j)
        A[n * index[i]:n * index[i] + n, col] = d
        A[n * index[j]:n * index[j] + n, col] = -d
    return A


def nullspace(A: np.ndarray, rtol: float) -> np.ndarray:
    """Orthonormal basis (columns) of ker A with a cutoff relative to the top singular value."""
    if A.shape[1] == 0:
        return np.zeros((0, 0))
    if A.shape[0] == 0:
        return np.eye(A.shape[1])
    _, sv, vt = np.linalg.svd(A, full_matrices=True)
    top = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > rtol * top)) if top > 0 else 0
    return vt[rank:].T.copy()


def self_stress_basis(fw: Framework, tol: Tolerances = DEFAULT_TOL) -> list[Stress]:
    K = nullspace(equilibrium_matrix(fw), tol.eps_rank)
    return [Stress.from_vector(fw, K[:, k]) for k in range(K.shape[1])]


# -- crossing refinement ------------------------------------------------------

@dataclass(frozen=True)
class SubEdge:
    """A piece of an original edge between two consecutive nodes on it."""
    u: object
    v: object
    origin: Edge
    ratio: float  # length(sub) / length(origin)


class _PointHash:
    """Merge points closer than ``eps`` using a uniform grid."""

    def __init__(self, eps: float):
        self.eps = eps
        self.cell = 4 * eps
        self.grid: dict[tuple, list] = {}

    def _cell(self, p):
        return tuple(int(math.floor(c / self.cell)) for c in p)

    def find(self, p):
        c = self._cell(p)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for q, ident in self.grid.get((c[0] + dx, c[1] + dy), ()):
                    if np.linalg.norm(q - p) <= self.eps:
                        return ident
        return None

    def add(self, p, ident):
        self.grid.setdefault(self._cell(p), []).append((p, ident))


def _cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _fresh_ids(fw: Framework):
    k = 0
    while True:
        name = f"x{k}"
        if name not in fw.vertices:
            yield name
        k += 1


def refine_crossings(fw: Framework, tol: Tolerances = DEFAULT_TOL):
    """Split every edge of a planar framework at its interior crossings.

    Returns ``(points, subedges)`` where ``points`` maps old and new node ids
    to coordinates and each :class:`SubEdge` remembers its original edge.
    Raises on collinear overlaps and on vertices lying inside other edges.
    """
    if fw.dim != 2:
        raise DimensionError("crossing refinement needs a framework in R^2")
    eps = tol.eps_geom
    scale = max(1.0, max((float(np.abs(p).max()) for p in fw.vertices.values()), default=1.0))
    eps_abs = eps * scale
    points = dict(fw.vertices)
    # parameters along each edge at which it is cut
    cuts: dict[Edge, list[tuple[float, object]]] = {e: [] for e in fw.edges}
    hashes = _PointHash(eps_abs)
    for v, p in fw.vertices.items():
        hashes.add(p, v)
    fresh = _fresh_ids(fw)

    # vertices lying in the relative interior of an edge
    for (i, j) in fw.edges:
        a, b = fw.vertices[i], fw.vertices[j]
        d = b - a
        L2 = float(d @ d)
        for v, p in fw.vertices.items():
            if v in (i, j):
                continue
            t = float((p - a) @ d) / L2
            if 0.0 < t < 1.0 and np.linalg.norm(a + t * d - p) <= eps_abs:
                raise CollinearOverlap(f"vertex {v!r} lies on edge {(i, j)!r}")

    edges = fw.edges
    for x in range(len(edges)):
        i, j = edges[x]
        a, b = fw.vertices[i], fw.vertices[j]
        r = b - a
        for y in range(x + 1, len(edges)):
            k, l = edges[y]
            c, d = fw.vertices[k], fw.vertices[l]
            s = d - c
            denom = _cross2(r, s)
            scale_rs = np.linalg.norm(r) * np.linalg.norm(s)
            if abs(denom) <= eps * scale_rs:
                # parallel: reject positive-length overlap on a common line
                if abs(_cross2(c - a, r)) <= eps_abs * np.linalg.norm(r):
                    rr = float(r @ r)
                    t0 = float((c - a) @ r) / rr
                    t1 = float((d - a) @ r) / rr
                    lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
                    if (hi - lo) * math.sqrt(rr) > eps_abs:
                        raise CollinearOverlap(f"edges {edges[x]!r} and {edges[y]!r} overlap")
                continue
            if {i, j} & {k, l}:
                continue
            t = _cross2(c - a, s) / denom
            u = _cross2(c - a, r) / denom
            # endpoints touching other edges were rejected above
            if 0.0 < t < 1.0 and 0.0 < u < 1.0:
                p = a + t * r
                ident = hashes.find(p)
                if ident is None:
                    ident = next(fresh)
                    points[ident] = p
                    hashes.add(p, ident)
                elif ident in fw.vertices:
                    raise CollinearOverlap(f"crossing of {edges[x]!r} and {edges[y]!r} at a vertex")
                cuts[edges[x]].append((t, ident))
                cuts[edges[y]].append((u, ident))

    subedges: list[SubEdge] = []
    for e in fw.edges:
        i, j = e
        seq = [(0.0, i)] + sorted(set(cuts[e]), key=lambda c: c[0]) + [(1.0, j)]
        # drop repeated ids created by merged triple crossings
        chain = []
        for t, ident in seq:
            if chain and chain[-1][1] == ident:
                continue
            chain.append((t, ident))
        for (t0, u), (t1, v) in zip(chain, chain[1:]):
            subedges.append(SubEdge(u, v, e, t1 - t0))
    return points, subedges


def subdivide_crossings(fw: Framework, s: Stress | None = None,
                        tol: Tolerances = DEFAULT_TOL):
    """Insert every interior crossing as a vertex and rescale the stress.

    A sub-edge covering the fraction ``lam`` of an old edge carries
    ``w / lam``, which keeps every old and new vertex in equilibrium.
    Returns ``(framework, stress)``; the stress is ``None`` if none was given.
    """
    points, subs = refine_crossings(fw, tol)
    new_fw = Framework(points, [(se.u, se.v) for se in subs], dim=2, tol=tol)
    if s is None:
        return new_fw, None
    _check_keys(fw, s)
    new_s = Stress({(se.u, se.v): s.get(se.origin) / se.ratio for se in subs})
    return new_fw, new_s


def has_crossings(fw: Framework, tol: Tolerances = DEFAULT_TOL) -> bool:
    _, subs = refine_crossings(fw, tol)
    return len(subs) != len(fw.edges)
