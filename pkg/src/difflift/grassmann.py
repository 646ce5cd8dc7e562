"""Signed distances between flats and liftings along paths of flats.

A path is a piecewise-linear motion of spanning points.  Along it the
signed distance to each face plane is a smooth function whose sign changes
mark crossings; a crossing counts when the meeting point lies inside the
face polytope, described by the inequalities ``<x - e, n(e, f)> >= 0`` of
its incident facets.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .core import DEFAULT_TOL, Tolerances, gram_volume
from .errors import (DegenerateConfiguration, DimensionError, NonSimplePath)
from .polytopal import (Flat, ForceLoad, MFramework, PolytopalComplex, _as_load,
                        require_equilibrium)

SAMPLES_PER_SEGMENT = 1024
MAX_SAMPLES = 2 ** 16


@dataclass(frozen=True)
class AffineFlat:
    points: np.ndarray  # (k + 1, n) spanning points, in orientation order

    def __init__(self, points, tol: Tolerances = DEFAULT_TOL):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if P.shape[0] < 1:
            raise DimensionError("a flat needs at least one spanning point")
        if not np.all(np.isfinite(P)):
            raise ValueError("non-finite spanning point")
        if P.shape[0] > 1:
            if P.shape[0] - 1 > P.shape[1]:
                raise DimensionError("too many spanning points for the ambient space")
            if gram_volume(P[1:] - P[0]) <= tol.eps_geom:
                raise DegenerateConfiguration("spanning points are affinely dependent")
        object.__setattr__(self, "points", P)

    @property
    def dim(self) -> int:
        return self.points.shape[0] - 1

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_flat(cls, f: Flat) -> "AffineFlat":
        return cls(np.vstack([f.base, f.base + f.basis]))

    def translated(self, v) -> "AffineFlat":
        return AffineFlat(self.points + np.asarray(v, dtype=float))


def _distance_batch(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Signed distances for a batch of moving flats P (T, k+1, n) to a fixed flat Q (m+1, n)."""
    dq = (Q[1:] - Q[0]).T  # (n, m)
    dp = np.swapaxes(P[:, 1:] - P[:, :1], 1, 2)  # (T, n, k)
    rel = np.swapaxes(P - Q[0], 1, 2)  # (T, n, k+1)
    T = P.shape[0]
    M = np.concatenate([np.broadcast_to(dq, (T,) + dq.shape), rel], axis=2)
    num = np.linalg.det(M)
    gq = np.sqrt(max(np.linalg.det(dq.T @ dq), 0.0)) if dq.shape[1] else 1.0
    if dp.shape[2]:
        gp = np.sqrt(np.clip(np.linalg.det(np.swapaxes(dp, 1, 2) @ dp), 0.0, None))
    else:
        gp = np.ones(T)
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / (gq * gp)


def flat_distance(a: AffineFlat, b: AffineFlat) -> float:
    """``det(b_2 - b_1, ..., a_1 - b_1, ...) / (vol(b) vol(a))`` with volumes of difference vectors."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError("flats live in different spaces")
    if a.points.shape[0] + b.points.shape[0] != a.ambient_dim + 1:
        raise DimensionError("point counts must add up to ambient_dim + 1")
    return float(_distance_batch(a.points[None], b.points)[0])


@dataclass(frozen=True)
class GrassmannPath:
    samples: tuple

    def __init__(self, samples: Sequence):
        flats = tuple(s if isinstance(s, AffineFlat) else AffineFlat(s) for s in samples)
        if len(flats) < 2:
            raise ValueError("a path needs at least two flats")
        shapes = {f.points.shape for f in flats}
        if len(shapes) != 1:
            raise DimensionError("path samples must have equal dimension")
        for u, v in zip(flats, flats[1:]):
            if np.array_equal(u.points, v.points):
                raise ValueError("consecutive path samples coincide")
        object.__setattr__(self, "samples", flats)

    @property
    def start(self) -> AffineFlat:
        return self.samples[0]

    @property
    def end(self) -> AffineFlat:
        return self.samples[-1]

    @property
    def segments(self) -> int:
        return len(self.samples) - 1

    def points_at(self, t: float) -> np.ndarray:
        """Spanning points at global parameter ``t`` in [0, 1]."""
        s = min(max(t, 0.0), 1.0) * self.segments
        k = min(int(s), self.segments - 1)
        u = s - k
        return (1 - u) * self.samples[k].points + u * self.samples[k + 1].points

    def reversed(self) -> "GrassmannPath":
        return GrassmannPath(self.samples[::-1])

    def __add__(self, other: "GrassmannPath") -> "GrassmannPath":
        if not np.allclose(self.end.points, other.start.points):
            raise ValueError("paths do not connect")
        return GrassmannPath(self.samples + other.samples[1:])


@dataclass(frozen=True)
class CrossingEvent:
    face: int
    t: float
    mu: int


# -- helpers -----------------------------------------------------------------------

def _mframework(target) -> MFramework:
    return target.mframework() if isinstance(target, PolytopalComplex) else target


def _face_points(mf: MFramework, f: int) -> np.ndarray:
    return AffineFlat.from_flat(mf.faces[f]).points


def _meeting_point(P: np.ndarray, face: Flat) -> np.ndarray:
    """Least-squares common point of span(P) and the face plane."""
    D = (P[1:] - P[0]).T
    A = np.hstack([D, -face.basis.T]) if face.dim else D
    rhs = face.base - P[0]
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    return P[0] + D @ sol[:D.shape[1]]


def _facet_margin(mf: MFramework, f: int, x: np.ndarray) -> float:
    """Smallest signed distance from ``x`` to the facets of face ``f`` (inside is positive)."""
    margins = [float((x - mf.edges[e].base) @ mf.normals[(e, f)]) for e in mf.incident_edges(f)]
    return min(margins, default=np.inf)


def _hull_generators(target):
    """Points and recession directions whose convex hull contains every face polytope."""
    if isinstance(target, PolytopalComplex):
        return target.vertices, np.zeros((0, target.ambient_dim))
    mf = target
    if mf.face_dim != 1:
        raise DimensionError("hull of an m-framework without polytopes is only defined for m = 1")
    pts, rays = [], []
    for f in range(len(mf.faces)):
        inc = mf.incident_edges(f)
        for e in inc:
            pts.append(mf.edges[e].base)
        if len(inc) == 1:
            rays.append(mf.normals[(inc[0], f)])
        elif len(inc) == 0:
            rays.extend([mf.faces[f].basis[0], -mf.faces[f].basis[0]])
            pts.append(mf.faces[f].base)
    return np.array(pts), np.array(rays).reshape(-1, mf.ambient_dim)


def flat_meets_hull(flat: AffineFlat, target) -> bool:
    """Linear-programming test for a common point of span(flat) and the hull."""
    from scipy.optimize import linprog

    V, R = _hull_generators(target)
    P = flat.points
    D = (P[1:] - P[0]).T
    n, k = D.shape
    nv, nr = len(V), len(R)
    # variables: s (free, k), lam (>= 0, nv), mu (>= 0, nr)
    A_eq = np.zeros((n + 1, k + nv + nr))
    A_eq[:n, :k] = D
    A_eq[:n, k:k + nv] = -V.T
    A_eq[:n, k + nv:] = -R.T
    A_eq[n, k:k + nv] = 1.0
    b_eq = np.append(-P[0], 1.0)
    bounds = [(None, None)] * k + [(0, None)] * (nv + nr)
    res = linprog(np.zeros(k + nv + nr), A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    return res.status == 0


# -- crossings ---------------------------------------------------------------------

def _scan_segment(P0, P1, Q, n_samples):
    t = np.linspace(0.0, 1.0, n_samples + 1)
    P = (1 - t)[:, None, None] * P0 + t[:, None, None] * P1
    return t, _distance_batch(P, Q)


def _segment_roots(P0, P1, Q, tol: Tolerances, scale: float) -> list[tuple[float, int, bool]]:
    """Roots of the distance along one segment as (t, sign change, is_tangency)."""
    t, g = _scan_segment(P0, P1, Q, SAMPLES_PER_SEGMENT)
    if not np.all(np.isfinite(g)):
        raise DegenerateConfiguration("path passes through a degenerate flat")

    def dist(u):
        P = (1 - u) * P0 + u * P1
        return float(_distance_batch(P[None], Q)[0])

    def dist_many(u):
        return _distance_batch((1 - u)[:, None, None] * P0 + u[:, None, None] * P1, Q)

    roots = []
    sg = np.sign(g)
    for k in np.nonzero(sg[:-1] * sg[1:] < 0)[0]:
        roots.append(_bisect(dist, t[k], t[k + 1], g[k], tol))
    for k in np.nonzero(sg == 0)[0]:
        left = sg[k - 1] if k > 0 else 0
        right = sg[k + 1] if k + 1 < len(sg) else 0
        if left and right and left != right:
            roots.append((float(t[k]), int(right), False))
        elif 0 < k < len(sg) - 1:
            roots.append((float(t[k]), 0, True))
        elif k == 0 and right:
            roots.append((0.0, int(right), False))
        elif k == len(sg) - 1 and left:
            roots.append((1.0, int(-left), False))
    # refine near local minima of |g| without a sign change (possible double roots)
    a = np.abs(g)
    mid = (a[1:-1] <= a[:-2]) & (a[1:-1] <= a[2:]) & (sg[:-2] == sg[1:-1]) & (sg[1:-1] == sg[2:]) \
        & (sg[1:-1] != 0)
    for k in np.nonzero(mid)[0] + 1:
        roots.extend(_refine_extremum(dist, dist_many, t[k - 1], t[k + 1], tol, scale))
    return roots


def _bisect(dist, lo, hi, glo, tol: Tolerances):
    root = brentq(dist, lo, hi, xtol=tol.eps_geom, rtol=4 * np.finfo(float).eps)
    return (float(root), int(-np.sign(glo)), False)


def _refine_extremum(dist, dist_many, lo, hi, tol: Tolerances, scale: float):
    n = 8
    while True:
        t = np.linspace(lo, hi, n + 1)
        g = dist_many(t)
        sg = np.sign(g)
        out = []
        for k in range(n):
            if sg[k] * sg[k + 1] < 0:
                out.append(_bisect(dist, t[k], t[k + 1], g[k], tol))
        if out:
            return out
        k = int(np.argmin(np.abs(g)))
        if abs(g[k]) <= tol.eps_geom * scale:
            return [(float(t[k]), 0, True)]
        if n * SAMPLES_PER_SEGMENT >= MAX_SAMPLES:
            return []
        # zoom in around the smallest value
        lo, hi = t[max(k - 1, 0)], t[min(k + 1, n)]
        n *= 2


def path_crossings(path: GrassmannPath, target, tol: Tolerances = DEFAULT_TOL,
                   check_start: bool = True) -> list[CrossingEvent]:
    """Transversal crossings of the path with the face polytopes, in path order.

    ``mu`` is the sign of the change of the signed distance through the root.
    A root exactly at the final flat is not counted.
    """
    mf = _mframework(target)
    n, m = mf.ambient_dim, mf.face_dim
    if path.start.ambient_dim != n or path.start.dim + m != n - 1:
        raise DimensionError(f"path flats must have dimension {n - 1 - m} in R^{n}")
    if check_start and flat_meets_hull(path.start, target):
        raise NonSimplePath("the starting flat meets the convex hull of the framework")
    scale = max(1.0, max(float(np.abs(f.base).max()) for f in mf.faces),
                float(np.abs(np.vstack([s.points for s in path.samples])).max()))
    near = 1e3 * tol.eps_geom * scale
    events = []
    for f in range(len(mf.faces)):
        Q = _face_points(mf, f)
        for seg in range(path.segments):
            P0, P1 = path.samples[seg].points, path.samples[seg + 1].points
            for u, mu, tangent in _segment_roots(P0, P1, Q, tol, scale):
                t_global = (seg + u) / path.segments
                last = seg == path.segments - 1 and u >= 1.0 - tol.eps_geom
                if last:
                    continue
                if u == 0.0 and seg > 0:
                    continue  # exact zero, already seen as the end of the previous segment
                if u == 1.0 and not tangent:
                    # exact zero at a joint: crossing only if the next segment leaves on the other side
                    P2 = path.samples[seg + 2].points
                    after = np.sign(_distance_batch(
                        (P1 + (P2 - P1) / SAMPLES_PER_SEGMENT)[None], Q)[0])
                    tangent = after != mu
                P = (1 - u) * P0 + u * P1
                x = _meeting_point(P, mf.faces[f])
                margin = _facet_margin(mf, f, x)
                if margin < -near:
                    continue
                if margin <= near:
                    raise NonSimplePath(f"path meets face {f} at (or near) a facet")
                if tangent:
                    raise NonSimplePath(f"path touches face {f} without crossing it")
                events.append(CrossingEvent(f, float(t_global), int(mu)))
    events.sort(key=lambda ev: (ev.t, ev.face))
    return events


def grassmann_lifting(path: GrassmannPath, target, w, tol: Tolerances = DEFAULT_TOL,
                      check_equilibrium: bool = True, check_start: bool = True) -> float:
    """``sum mu * w(f) * dist(final flat, f)`` over the crossings of ``path``."""
    mf = _mframework(target)
    w = _as_load(mf, w)
    if check_equilibrium:
        require_equilibrium(mf, w, tol)
    total = 0.0
    for ev in path_crossings(path, mf if not isinstance(target, PolytopalComplex) else target,
                             tol, check_start):
        total += ev.mu * w[ev.face] * flat_distance(path.end, AffineFlat(_face_points(mf, ev.face)))
    return total


# -- trivalent stars ---------------------------------------------------------------

def _check_angle(x: float, name: str):
    x = float(x)
    if not (0.0 < x < 2 * np.pi) or np.isclose(x, np.pi, atol=1e-12, rtol=0):
        raise ValueError(f"{name} must lie in (0, pi) or (pi, 2 pi), got {x!r}")
    return x


def trivalent_star(alpha: float, beta: float, lam: float = 1.0,
                   tol: Tolerances = DEFAULT_TOL) -> tuple[MFramework, ForceLoad]:
    """Three rays from the origin in the xy-plane with the balancing loads.

    Directions ``(1, 0, 0)``, ``(cos a, sin a, 0)``, ``(cos b, sin b, 0)`` carry
    ``lam sin(a - b)``, ``lam sin b`` and ``-lam sin a``.
    """
    alpha, beta = _check_angle(alpha, "alpha"), _check_angle(beta, "beta")
    if np.isclose(alpha, beta, atol=1e-12, rtol=0):
        raise ValueError("alpha and beta must differ")
    dirs = [np.array([1.0, 0, 0]), np.array([np.cos(alpha), np.sin(alpha), 0.0]),
            np.array([np.cos(beta), np.sin(beta), 0.0])]
    origin = np.zeros(3)
    faces = [Flat(origin, d[None, :]) for d in dirs]
    edges = [Flat(origin, np.zeros((0, 3)))]
    normals = {(0, k): d for k, d in enumerate(dirs)}
    mf = MFramework(edges, faces, normals, tol)
    loads = ForceLoad([lam * np.sin(alpha - beta), lam * np.sin(beta), -lam * np.sin(alpha)])
    return mf, loads


def trivalent_monodromy_identity(alpha: float, beta: float, a: float, b: float,
                                 c: float, d: float, lam: float = 1.0) -> float:
    """The three-term weighted distance sum from the line through (a, b, 0), (c, d, 1)."""
    alpha, beta = _check_angle(alpha, "alpha"), _check_angle(beta, "beta")
    if np.isclose(alpha, beta, atol=1e-12, rtol=0):
        raise ValueError("alpha and beta must differ")
    line = AffineFlat([[a, b, 0.0], [c, d, 1.0]])
    p1 = np.zeros(3)
    arms = [(1.0, 0.0), (np.cos(alpha), np.sin(alpha)), (np.cos(beta), np.sin(beta))]
    loads = [lam * np.sin(alpha - beta), lam * np.sin(beta), -lam * np.sin(alpha)]
    total = 0.0
    for (x, y), load in zip(arms, loads):
        total += load * flat_distance(line, AffineFlat([p1, [x, y, 0.0]]))
    return total
