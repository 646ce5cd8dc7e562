"""m-frameworks, polytopal complexes, force-loads and m-form liftings.

Planes are stored as :class:`Flat` (base point plus orthonormal direction
rows).  A :class:`PolytopalComplex` holds m-polytopes over a shared vertex
array; its facets are identified by vertex sets, so two polytopes share a
facet exactly when they list the same vertices for it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import DEFAULT_TOL, MForm, Tolerances, as_vec, covector, wedge
from .errors import DimensionError, InvalidComplex, NotEquilibrium
from .framework import Framework, Stress, nullspace


# -- flats -------------------------------------------------------------------------

@dataclass(frozen=True)
class Flat:
    """Affine plane ``base + span(basis rows)``; the row order fixes the orientation."""
    base: np.ndarray
    basis: np.ndarray  # (k, n), orthonormal rows

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.base.size

    @classmethod
    def from_points(cls, points, tol: Tolerances = DEFAULT_TOL) -> "Flat":
        """Flat through ``points``, oriented by Gram-Schmidt on ``p_k - p_0`` in order."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        base = P[0].copy()
        rows: list[np.ndarray] = []
        scale = max(1.0, float(np.abs(P).max()))
        for q in P[1:]:
            v = q - base
            for r in rows:
                v = v - (v @ r) * r
            nv = np.linalg.norm(v)
            if nv > 1e3 * tol.eps_geom * scale:
                rows.append(v / nv)
        basis = np.array(rows).reshape(len(rows), P.shape[1])
        return cls(base, basis)

    def project(self, x) -> np.ndarray:
        """Orthogonal projection of ``x`` onto the direction space."""
        x = np.asarray(x, dtype=float)
        return self.basis.T @ (self.basis @ x) if self.dim else np.zeros_like(x)

    def local(self, x) -> np.ndarray:
        return self.basis @ (np.asarray(x, dtype=float) - self.base)

    def distance_to(self, x) -> float:
        r = np.asarray(x, dtype=float) - self.base
        return float(np.linalg.norm(r - self.project(r)))

    def same_plane(self, other: "Flat", eps: float) -> bool:
        if self.dim != other.dim:
            return False
        if other.distance_to(self.base) > eps:
            return False
        # equal direction spaces: every basis row of one lies in the other
        return all(np.linalg.norm(r - other.project(r)) <= eps for r in self.basis)

    def reversed(self) -> "Flat":
        if self.dim == 0:
            return self
        B = self.basis.copy()
        B[-1] = -B[-1]
        return Flat(self.base, B)


def _check_orthonormal(basis: np.ndarray, tol: Tolerances):
    k = basis.shape[0]
    if k and np.abs(basis @ basis.T - np.eye(k)).max() > tol.eps_geom * 10:
        raise DimensionError("direction basis is not orthonormal")


def face_form(face: Flat | np.ndarray, tol: Tolerances = DEFAULT_TOL) -> MForm:
    """``de_1 ^ ... ^ de_m`` for the oriented orthonormal basis of ``face``.

    Accepts a :class:`Flat` or a bare ``(m, n)`` basis array.
    """
    B = face.basis if isinstance(face, Flat) else np.atleast_2d(np.asarray(face, dtype=float))
    _check_orthonormal(B, tol)
    m, n = B.shape
    if m == 0:
        return MForm.scalar(n, 1.0)
    coeffs = {}
    for idx in itertools.combinations(range(n), m):
        c = float(np.linalg.det(B[:, idx]))
        if c != 0.0:
            coeffs[tuple(i + 1 for i in idx)] = c
    return MForm(n, m, coeffs)


# -- m-frameworks -----------------------------------------------------------------

class MFramework:
    """Edge planes, face planes, incidences and unit normals ``n(e, f)``."""

    def __init__(self, edges: Sequence[Flat], faces: Sequence[Flat], normals: Mapping,
                 tol: Tolerances = DEFAULT_TOL):
        self.edges = list(edges)
        self.faces = list(faces)
        if not self.faces:
            raise InvalidComplex("an m-framework needs at least one face")
        self.ambient_dim = self.faces[0].ambient_dim
        self.face_dim = self.faces[0].dim
        n, m = self.ambient_dim, self.face_dim
        if not n > m >= 1:
            raise DimensionError(f"need n > m >= 1, got n={n}, m={m}")
        for f in self.faces:
            if f.dim != m or f.ambient_dim != n:
                raise DimensionError("faces have inconsistent dimensions")
            _check_orthonormal(f.basis, tol)
        for e in self.edges:
            if e.dim != m - 1 or e.ambient_dim != n:
                raise DimensionError("edges must be (m-1)-planes in the same space")
            _check_orthonormal(e.basis, tol)
        self.normals: dict = {}
        for (ei, fi), v in sorted(normals.items()):
            v = as_vec(v, n)
            e, f = self.edges[ei], self.faces[fi]
            eps = 10 * tol.eps_geom
            if abs(np.linalg.norm(v) - 1.0) > eps:
                raise InvalidComplex(f"normal at {(ei, fi)} is not a unit vector")
            if np.linalg.norm(v - f.project(v)) > eps:
                raise InvalidComplex(f"normal at {(ei, fi)} leaves its face")
            if e.dim and np.abs(e.basis @ v).max() > eps:
                raise InvalidComplex(f"normal at {(ei, fi)} is not orthogonal to its edge")
            self.normals[(ei, fi)] = v
        self.incidences = list(self.normals)
        self.tol = tol

    def incident_faces(self, e: int) -> list[int]:
        return [fi for (ei, fi) in self.incidences if ei == e]

    def incident_edges(self, f: int) -> list[int]:
        return [ei for (ei, fi) in self.incidences if fi == f]

    def edge_form(self, e: int) -> MForm:
        """Wedge of the fixed orthonormal basis of edge ``e`` (the 0-form 1 when m = 1)."""
        return face_form(self.edges[e], self.tol)


@dataclass(frozen=True)
class ForceLoad:
    values: tuple

    def __init__(self, values):
        object.__setattr__(self, "values", tuple(float(v) for v in np.asarray(values, dtype=float).ravel()))

    def __getitem__(self, f: int) -> float:
        return self.values[f]

    def __len__(self):
        return len(self.values)

    def as_vector(self) -> np.ndarray:
        return np.array(self.values)

    def __add__(self, other: "ForceLoad") -> "ForceLoad":
        return ForceLoad(self.as_vector() + other.as_vector())

    def __mul__(self, c: float) -> "ForceLoad":
        return ForceLoad(float(c) * self.as_vector())

    __rmul__ = __mul__


def _as_load(mf: MFramework, w) -> ForceLoad:
    w = w if isinstance(w, ForceLoad) else ForceLoad(w)
    if len(w) != len(mf.faces):
        raise DimensionError(f"force-load has {len(w)} values for {len(mf.faces)} faces")
    return w


def forceload_residuals(mf: MFramework, w) -> dict[int, np.ndarray]:
    """``sum_f w(f) n(e, f)`` for every edge plane."""
    w = _as_load(mf, w)
    out = {e: np.zeros(mf.ambient_dim) for e in range(len(mf.edges))}
    for (e, f), v in mf.normals.items():
        out[e] = out[e] + w[f] * v
    return out


def forceload_error(mf: MFramework, w) -> float:
    return max((float(np.linalg.norm(r)) for r in forceload_residuals(mf, w).values()), default=0.0)


def is_equilibrium(mf: MFramework, w, tol: Tolerances | None = None) -> bool:
    tol = tol or mf.tol
    w = _as_load(mf, w)
    scale = max(1.0, float(np.abs(w.as_vector()).max(initial=0.0)))
    return forceload_error(mf, w) <= 10 * tol.eps_geom * scale


def require_equilibrium(mf: MFramework, w, tol: Tolerances | None = None):
    if not is_equilibrium(mf, w, tol):
        raise NotEquilibrium(f"force-load is not in equilibrium (residual {forceload_error(mf, w):.3g})")


def forceload_matrix(mf: MFramework) -> np.ndarray:
    n = mf.ambient_dim
    A = np.zeros((n * len(mf.edges), len(mf.faces)))
    for (e, f), v in mf.normals.items():
        A[n * e:n * e + n, f] += v
    return A


def forceload_basis(mf: MFramework, tol: Tolerances | None = None) -> list[ForceLoad]:
    tol = tol or mf.tol
    N = nullspace(forceload_matrix(mf), tol.eps_rank)
    return [ForceLoad(N[:, k]) for k in range(N.shape[1])]


def facet_monodromy(mf: MFramework, w, e: int) -> MForm:
    """``sum_f w(f) * (alpha_e ^ d n(e, f))`` over the faces incident to edge ``e``."""
    w = _as_load(mf, w)
    faces = mf.incident_faces(e)
    if not faces:
        raise InvalidComplex(f"edge {e} has no incident face")
    total = np.zeros(mf.ambient_dim)
    for f in faces:
        total += w[f] * mf.normals[(e, f)]
    return wedge(mf.edge_form(e), covector(total))


def lifting_of_word_m(target, w, word: Iterable) -> MForm:
    """``sum sign * w(f) * alpha_f`` over the word's (face index, sign) entries."""
    mf = target.mframework() if isinstance(target, PolytopalComplex) else target
    w = _as_load(mf, w)
    total = MForm.zero(mf.ambient_dim, mf.face_dim)
    for f, sign in word:
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not 0 <= f < len(mf.faces):
            raise InvalidComplex(f"unknown face {f!r}")
        total = total + (sign * w[f]) * face_form(mf.faces[f], mf.tol)
    return total


# -- polytopal complexes ---------------------------------------------------------

def _convex_hull_facets(P: np.ndarray, ids: Sequence[int], tol: Tolerances) -> list[tuple]:
    """Facets (as sorted vertex-id tuples) of a full-dimensional polytope in local coordinates."""
    from scipy.spatial import ConvexHull

    hull = ConvexHull(P)
    groups: dict = {}
    scale = max(1.0, float(np.abs(P).max()))
    for eq in hull.equations:
        key = None
        for k in groups:
            if np.allclose(eq, np.array(k), atol=1e3 * tol.eps_geom * scale):
                key = k
                break
        if key is None:
            key = tuple(eq)
            on = np.abs(P @ eq[:-1] + eq[-1]) <= 1e3 * tol.eps_geom * scale
            groups[key] = tuple(sorted(ids[i] for i in np.nonzero(on)[0]))
    return list(groups.values())


class PolytopalComplex:
    """m-polytopes in R^n over a shared vertex array.

    ``cells`` are vertex-index sequences: for m = 1 a pair ``(i, j)``; for
    m = 2 an ordered loop (its order orients the polygon); for m >= 3 the
    vertex set of a convex polytope whose facets are found by convex hull.
    For m >= 3 the pairwise-intersection rule is the caller's
    responsibility, which is recorded in ``caller_validated``.
    """

    def __init__(self, vertices, cells: Sequence[Sequence[int]], face_dim: int,
                 tol: Tolerances = DEFAULT_TOL, validate: bool = True):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] == 0:
            raise InvalidComplex("vertices must be a non-empty (k, n) array")
        self.vertices = V
        self.ambient_dim = V.shape[1]
        self.face_dim = int(face_dim)
        if not self.ambient_dim > self.face_dim >= 1:
            raise DimensionError("need ambient_dim > face_dim >= 1")
        self.cells = [tuple(int(i) for i in c) for c in cells]
        self.tol = tol
        self.caller_validated = self.face_dim >= 3 or (self.face_dim == 2 and self.ambient_dim != 3)
        self._check_vertices()
        self.cell_facets: list[list[tuple]] = [self._facets_of(k) for k in range(len(self.cells))]
        self.facets: list[tuple] = []
        self.facet_cells: dict[tuple, list[int]] = {}
        for k, fs in enumerate(self.cell_facets):
            for fc in fs:
                if fc not in self.facet_cells:
                    self.facet_cells[fc] = []
                    self.facets.append(fc)
                self.facet_cells[fc].append(k)
        self._mf: MFramework | None = None
        if validate:
            validate_complex(self)

    @property
    def scale(self) -> float:
        return max(1.0, float(np.abs(self.vertices).max()))

    def _check_vertices(self):
        V = self.vertices
        eps = self.tol.eps_geom * self.scale
        order = np.lexsort(V.T[::-1])
        for a, b in zip(order[:-1], order[1:]):
            if np.linalg.norm(V[a] - V[b]) <= eps:
                raise InvalidComplex(f"vertices {a} and {b} coincide")
        for c in self.cells:
            if any(not 0 <= i < len(V) for i in c):
                raise InvalidComplex(f"cell {c} references an unknown vertex")
            if len(set(c)) != len(c):
                raise InvalidComplex(f"cell {c} repeats a vertex")

    def _facets_of(self, k: int) -> list[tuple]:
        c, m = self.cells[k], self.face_dim
        if m == 1:
            if len(c) != 2:
                raise InvalidComplex("1-cells are vertex pairs")
            return [(c[0],), (c[1],)]
        if m == 2:
            if len(c) < 3:
                raise InvalidComplex("polygons need at least three vertices")
            return [tuple(sorted((c[t], c[(t + 1) % len(c)]))) for t in range(len(c))]
        flat = Flat.from_points(self.vertices[list(c)], self.tol)
        if flat.dim != m:
            raise InvalidComplex(f"cell {k} does not span an {m}-plane")
        local = np.array([flat.local(self.vertices[i]) for i in c])
        return _convex_hull_facets(local, c, self.tol)

    def cell_flat(self, k: int) -> Flat:
        """Span of cell ``k``, oriented by its vertex order."""
        c = self.cells[k]
        pts = self.vertices[list(c)]
        flat = Flat.from_points(pts, self.tol)
        if flat.dim != self.face_dim:
            raise InvalidComplex(f"cell {k} is degenerate (spans dimension {flat.dim})")
        if self.face_dim == 2:
            loc = np.array([flat.local(p) for p in pts])
            x, y = loc[:, 0], loc[:, 1]
            area = 0.5 * float(x @ np.roll(y, -1) - np.roll(x, -1) @ y)
            if area < 0:
                flat = flat.reversed()
        return flat

    def facet_flat(self, fc: tuple) -> Flat:
        flat = Flat.from_points(self.vertices[list(fc)], self.tol)
        if flat.dim != self.face_dim - 1:
            raise InvalidComplex(f"facet {fc} is degenerate")
        return flat

    def volume(self, k: int) -> float:
        """m-dimensional volume of cell ``k``."""
        c = self.cells[k]
        pts = self.vertices[list(c)]
        if self.face_dim == 1:
            return float(np.linalg.norm(pts[1] - pts[0]))
        flat = self.cell_flat(k)
        loc = np.array([flat.local(p) for p in pts])
        if self.face_dim == 2:
            x, y = loc[:, 0], loc[:, 1]
            return abs(0.5 * float(x @ np.roll(y, -1) - np.roll(x, -1) @ y))
        from scipy.spatial import ConvexHull
        return float(ConvexHull(loc).volume)

    def __eq__(self, other):
        if not isinstance(other, PolytopalComplex):
            return NotImplemented
        return (self.face_dim == other.face_dim and self.cells == other.cells
                and np.array_equal(self.vertices, other.vertices))

    __hash__ = None

    def mframework(self) -> MFramework:
        if self._mf is None:
            self._mf = associated_mframework(self)
        return self._mf


def associated_mframework(c: PolytopalComplex) -> MFramework:
    """Planes of facets and polytopes with inward unit normals."""
    faces = [c.cell_flat(k) for k in range(len(c.cells))]
    edges = [c.facet_flat(fc) for fc in c.facets]
    index = {fc: i for i, fc in enumerate(c.facets)}
    normals = {}
    for k, fs in enumerate(c.cell_facets):
        centroid = c.vertices[list(c.cells[k])].mean(axis=0)
        for fc in fs:
            e = edges[index[fc]]
            v = faces[k].project(centroid - e.base)
            v = v - e.project(v)
            nv = np.linalg.norm(v)
            if nv <= c.tol.eps_geom * c.scale:
                raise InvalidComplex(f"cell {k} is degenerate at facet {fc}")
            normals[(index[fc], k)] = v / nv
    return MFramework(edges, faces, normals, c.tol)


def convert_stress_forceload(c: PolytopalComplex, values, to_forceload: bool = True) -> ForceLoad:
    """Multiply (or divide) per-face values by the face volumes."""
    vals = values.as_vector() if isinstance(values, ForceLoad) else (
        np.array([values[k] for k in range(len(c.cells))], dtype=float)
        if isinstance(values, Mapping) else np.asarray(values, dtype=float))
    if vals.size != len(c.cells):
        raise DimensionError("one value per face is required")
    vols = np.array([c.volume(k) for k in range(len(c.cells))])
    if to_forceload:
        return ForceLoad(vols * vals)
    if np.any(vols <= c.tol.eps_geom):
        raise InvalidComplex("zero-volume face cannot be converted to a stress")
    return ForceLoad(vals / vols)


# -- validation (m = 2 in R^3, and m = 1) ------------------------------------------

def _polygon_checks(c: PolytopalComplex, k: int):
    pts = c.vertices[list(c.cells[k])]
    flat = c.cell_flat(k)
    eps = 1e3 * c.tol.eps_geom * c.scale
    if any(flat.distance_to(p) > eps for p in pts):
        raise InvalidComplex(f"polygon {k} is not planar")
    loc = np.array([flat.local(p) for p in pts])
    nxt, prv = np.roll(loc, -1, axis=0), np.roll(loc, 1, axis=0)
    a, b = loc - prv, nxt - loc
    turns = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    if np.any(turns <= eps) and np.any(turns >= -eps):
        raise InvalidComplex(f"polygon {k} is not strictly convex")
    # a strictly convex vertex sequence can still wind twice
    ang = np.arctan2(b[:, 1], b[:, 0]) - np.arctan2(a[:, 1], a[:, 0])
    ang = (ang + np.pi) % (2 * np.pi) - np.pi
    if abs(abs(ang.sum()) - 2 * np.pi) > 1e-6:
        raise InvalidComplex(f"polygon {k} is not simple")


def _plane_section(pts: np.ndarray, normal, offset, eps) -> np.ndarray:
    """Points of the convex polygon ``pts`` on the plane ``<x, normal> = offset``."""
    d = pts @ normal - offset
    out = [p for p, s in zip(pts, d) if abs(s) <= eps]
    for t in range(len(pts)):
        s0, s1 = d[t], d[(t + 1) % len(pts)]
        if (s0 > eps and s1 < -eps) or (s0 < -eps and s1 > eps):
            p0, p1 = pts[t], pts[(t + 1) % len(pts)]
            out.append(p0 + (s0 / (s0 - s1)) * (p1 - p0))
    return np.array(out).reshape(-1, pts.shape[1])


def _clip_convex(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clip of a CCW convex polygon by another CCW convex polygon."""
    out = subject
    for t in range(len(clip)):
        a, b = clip[t], clip[(t + 1) % len(clip)]
        if len(out) == 0:
            break
        inp, out = out, []
        side = lambda p: (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        for s in range(len(inp)):
            p, q = inp[s], inp[(s + 1) % len(inp)]
            sp, sq = side(p), side(q)
            if sp >= 0:
                out.append(p)
            if (sp >= 0) != (sq >= 0):
                out.append(p + (sp / (sp - sq)) * (q - p))
        out = np.array(out).reshape(-1, 2)
    return np.asarray(out).reshape(-1, 2)


def _pair_overlap(c: PolytopalComplex, k: int, l: int, flats) -> tuple[int, np.ndarray]:
    """(dimension, support points) of the intersection of polygons k and l."""
    A = c.vertices[list(c.cells[k])]
    B = c.vertices[list(c.cells[l])]
    fa, fb = flats[k], flats[l]
    na, nb = np.cross(*fa.basis), np.cross(*fb.basis)
    eps = 1e3 * c.tol.eps_geom * c.scale
    line = np.cross(na, nb)
    if np.linalg.norm(line) <= 1e-12:
        if abs((fb.base - fa.base) @ na) > eps:
            return -1, np.zeros((0, 3))  # parallel planes
        la = np.array([fa.local(p) for p in A])
        lb = np.array([fa.local(p) for p in B])
        if _signed(la) < 0:
            la = la[::-1]
        if _signed(lb) < 0:
            lb = lb[::-1]
        inter = _clip_convex(la, lb)
        if len(inter) >= 3 and abs(_signed(inter)) > eps:
            return 2, inter
        if len(inter) == 0:
            return -1, inter
        span = np.ptp(inter, axis=0).max() if len(inter) else 0.0
        pts3 = np.array([fa.base + fa.basis.T @ q for q in inter])
        return (1 if span > eps else 0), pts3
    sa = _plane_section(A, nb, nb @ fb.base, eps)
    sb = _plane_section(B, na, na @ fa.base, eps)
    if len(sa) == 0 or len(sb) == 0:
        return -1, np.zeros((0, 3))
    u = line / np.linalg.norm(line)
    ta, tb = sa @ u, sb @ u
    lo, hi = max(ta.min(), tb.min()), min(ta.max(), tb.max())
    if hi < lo - eps:
        return -1, np.zeros((0, 3))
    ref = sa[np.argmin(ta)]
    pts = np.array([ref + (lo - ta.min()) * u, ref + (hi - ta.min()) * u])
    return (1 if hi - lo > eps else 0), pts


def _signed(P: np.ndarray) -> float:
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(x @ np.roll(y, -1) - np.roll(x, -1) @ y)


def validate_complex(c: PolytopalComplex):
    """Check the pairwise-intersection rule (m = 2 in R^3, and m = 1) and distinct facet planes.

    Raises :class:`InvalidComplex` on the first violation.
    """
    eps = 1e3 * c.tol.eps_geom * c.scale
    flats = [c.cell_flat(k) for k in range(len(c.cells))]
    facet_flats = [c.facet_flat(fc) for fc in c.facets]
    for a, b in itertools.combinations(range(len(c.facets)), 2):
        if facet_flats[a].same_plane(facet_flats[b], eps):
            raise InvalidComplex(f"facets {c.facets[a]} and {c.facets[b]} span the same plane")
    if c.face_dim == 1:
        _validate_segments(c, eps)
    elif c.face_dim == 2 and c.ambient_dim == 3:
        for k in range(len(c.cells)):
            _polygon_checks(c, k)
        shared = {}
        for fc, cells in c.facet_cells.items():
            for k, l in itertools.combinations(sorted(cells), 2):
                shared.setdefault((k, l), []).append(fc)
        for k, l in itertools.combinations(range(len(c.cells)), 2):
            dim, pts = _pair_overlap(c, k, l, flats)
            if dim == 2:
                raise InvalidComplex(f"polygons {k} and {l} overlap in a region")
            if dim == 1:
                common = shared.get((k, l), [])
                ok = False
                if len(common) == 1:
                    seg = c.vertices[list(common[0])]
                    ok = all(min(np.linalg.norm(p - q) for q in seg) <= eps for p in pts)
                if not ok:
                    raise InvalidComplex(f"polygons {k} and {l} meet along a segment that is not a shared edge")
            if len(shared.get((k, l), [])) > 1:
                raise InvalidComplex(f"polygons {k} and {l} share more than one edge")


def _validate_segments(c: PolytopalComplex, eps: float):
    from .homotopy import segment_distance

    V = c.vertices
    for k, l in itertools.combinations(range(len(c.cells)), 2):
        a, b = c.cells[k], c.cells[l]
        common = set(a) & set(b)
        if len(common) == 2:
            raise InvalidComplex(f"segments {k} and {l} coincide")
        p0, p1, q0, q1 = V[a[0]], V[a[1]], V[b[0]], V[b[1]]
        if common:
            (v,) = common
            da = V[a[0] if a[1] == v else a[1]] - V[v]
            db = V[b[0] if b[1] == v else b[1]] - V[v]
            cos = float(da @ db) / (np.linalg.norm(da) * np.linalg.norm(db))
            if cos > 1 - 1e-12:
                raise InvalidComplex(f"segments {k} and {l} overlap")
            continue
        if segment_distance(p0, p1, q0, q1) <= eps:
            raise InvalidComplex(f"segments {k} and {l} intersect away from a shared vertex")


# -- constructions -----------------------------------------------------------------

def complex_from_framework(fw: Framework, tol: Tolerances | None = None) -> PolytopalComplex:
    """The 1-dimensional complex whose cells are the framework's edges."""
    tol = tol or DEFAULT_TOL
    ids = list(fw.vertices)
    index = {v: k for k, v in enumerate(ids)}
    V = np.array([fw.point(v) for v in ids])
    cells = [(index[i], index[j]) for i, j in fw.edges]
    return PolytopalComplex(V, cells, 1, tol, validate=False)


def forceload_from_stress(fw: Framework, s: Stress) -> ForceLoad:
    """Force-load ``w_ij * |p_i - p_j|`` on the edge lines, in ``fw.edges`` order."""
    return ForceLoad([s.get(e) * np.linalg.norm(fw.edge_vector(*e)) for e in fw.edges])


def parallel_prism_complex(vertices, faces: Sequence[Sequence[int]], scale: float,
                           tol: Tolerances = DEFAULT_TOL) -> PolytopalComplex:
    """Mesh, its homothetic copy ``scale * mesh`` and one trapezoid per mesh edge."""
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] != 3:
        raise DimensionError("mesh vertices must be points in R^3")
    lam = float(scale)
    if abs(lam - 1.0) <= tol.eps_geom:
        raise InvalidComplex("scale 1 makes the copy coincide with the mesh")
    if lam <= tol.eps_geom:
        raise InvalidComplex("scale must be positive")
    k = len(V)
    eps = 1e3 * tol.eps_geom * max(1.0, float(np.abs(V).max()))
    for loop in faces:
        fl = Flat.from_points(V[list(loop)], tol)
        if fl.dim != 2 or any(fl.distance_to(V[i]) > eps for i in loop):
            raise InvalidComplex(f"mesh face {tuple(loop)} is not planar")
        if fl.distance_to(np.zeros(3)) <= eps:
            raise InvalidComplex("the homothety centre lies in the plane of a mesh face")
    edges = []
    seen = set()
    for loop in faces:
        for t in range(len(loop)):
            u, v = loop[t], loop[(t + 1) % len(loop)]
            key = frozenset((u, v))
            if key not in seen:
                seen.add(key)
                edges.append((u, v))
    cells = [tuple(loop) for loop in faces]
    cells += [tuple(i + k for i in loop) for loop in faces]
    cells += [(u, v, v + k, u + k) for u, v in edges]
    return PolytopalComplex(np.vstack([V, lam * V]), cells, 2, tol)
