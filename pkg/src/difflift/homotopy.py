"""Differential liftings of frameworks in R^n on crossing words and loops.

A homotopy class of loops is represented relative to the trivial class by
the signed sequence of edge crossings that winds it up (a *crossing word*).
Entry ``((i, j), k)`` means the unwinding homotopy crossed edge ``p_i p_j``
with ``lk(before, c) - lk(after, c) = k`` for any cycle ``c`` that runs
through the edge from ``p_j`` to ``p_i``; its contribution is
``k * w_ij * d(p_i - p_j)``.  A small loop ``g`` around a single edge thus
has value ``lk(g, c) * w_ij * d(p_i - p_j)`` with ``c`` entering at ``p_j``.

Linking numbers follow the Gauss-map convention
``lk(A, B) = deg(-(a - b)/|a - b|)``, which equals
``(1/4pi) ∮∮ (a - b) . (da x db) / |a - b|^3``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import DEFAULT_TOL, MForm, Tolerances, as_vec, covector
from .errors import (ConsistencyError, DegenerateConfiguration, DimensionError,
                     InvalidFramework, LoopsIntersect, NonTransversal)
from .framework import Framework, Stress, edge_key, require_self_stress

MAX_RETRIES = 32

# lk(A, B) = PROJECTION_SIGN * sum over crossings with A above B of sign(dA x dB)
PROJECTION_SIGN = 1
# cone crossings are lk(before) - lk(after) against cycles running q2 -> q1
CONE_SIGN = -1


@dataclass(frozen=True)
class CrossingWord:
    entries: tuple = ()

    def __init__(self, entries: Iterable = ()):
        clean = []
        for (i, j), sign in entries:
            if sign not in (1, -1):
                raise ValueError(f"crossing sign must be +1 or -1, got {sign!r}")
            if i == j:
                raise InvalidFramework(f"loop edge {(i, j)!r} in crossing word")
            clean.append(((i, j), int(sign)))
        object.__setattr__(self, "entries", tuple(clean))

    def __add__(self, other: "CrossingWord") -> "CrossingWord":
        return CrossingWord(self.entries + other.entries)

    def inverse(self) -> "CrossingWord":
        """The word unwinding this one (reverse order, opposite signs)."""
        return CrossingWord(((e, -k) for e, k in reversed(self.entries)))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


class PolygonalLoop:
    """A closed polyline in R^3 (last point connects back to the first)."""

    def __init__(self, points, tol: Tolerances = DEFAULT_TOL):
        P = np.asarray(points, dtype=float)
        if P.ndim != 2 or P.shape[1] != 3:
            raise DimensionError("loop points must be an (k, 3) array")
        if len(P) < 3:
            raise ValueError("a loop needs at least three points")
        seg = np.roll(P, -1, axis=0) - P
        if np.any(np.linalg.norm(seg, axis=1) <= tol.eps_geom):
            raise ValueError("consecutive loop points coincide")
        self.points = P

    def segments(self):
        P = self.points
        return P, np.roll(P, -1, axis=0)

    def reversed(self) -> "PolygonalLoop":
        return PolygonalLoop(self.points[::-1])

    def refined(self) -> "PolygonalLoop":
        """Same curve with every segment split at its midpoint."""
        a, b = self.segments()
        mids = 0.5 * (a + b)
        return PolygonalLoop(np.stack([a, mids], axis=1).reshape(-1, 3))

    def transformed(self, R=None, t=None) -> "PolygonalLoop":
        P = self.points
        if R is not None:
            P = P @ np.asarray(R).T
        if t is not None:
            P = P + np.asarray(t)
        return PolygonalLoop(P)

    def __len__(self):
        return len(self.points)


# -- forms ---------------------------------------------------------------------

def _stress_on(fw: Framework, s: Stress, i, j) -> float:
    if not fw.has_edge(i, j):
        raise InvalidFramework(f"{(i, j)!r} is not an edge of the framework")
    return s.get((i, j))


def elementary_lifting_form(fw: Framework, s: Stress, edge, sign: int = 1) -> MForm:
    """``sign * w_ij * d(p_i - p_j)`` for the oriented edge ``(i, j)``."""
    i, j = edge
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return covector(sign * _stress_on(fw, s, i, j) * fw.edge_vector(i, j))


def elementary_forms(fw: Framework, s: Stress) -> dict:
    """All elementary forms, keyed by both orientations of every edge."""
    out = {}
    for i, j in fw.edges:
        out[(i, j)] = elementary_lifting_form(fw, s, (i, j))
        out[(j, i)] = elementary_lifting_form(fw, s, (j, i))
    return out


def lifting_of_word(fw: Framework, s: Stress, word: CrossingWord | Iterable) -> MForm:
    if not isinstance(word, CrossingWord):
        word = CrossingWord(word)
    total = MForm.zero(fw.dim, 1)
    for edge, sign in word:
        total = total + elementary_lifting_form(fw, s, edge, sign)
    return total


def vertex_monodromy(fw: Framework, s: Stress, vertex) -> MForm:
    """``d(sum_j w_ij (p_i - p_j))``; zero exactly when vertex i is balanced."""
    if vertex not in fw.vertices:
        raise InvalidFramework(f"unknown vertex {vertex!r}")
    total = np.zeros(fw.dim)
    for j in fw.neighbours(vertex):
        total += s.get((vertex, j)) * fw.edge_vector(vertex, j)
    return covector(total)


def recover_stress_nd(fw: Framework, elementary_values: Mapping,
                      tol: Tolerances = DEFAULT_TOL) -> Stress:
    """Invert :func:`elementary_lifting_form` edge by edge.

    ``elementary_values`` maps oriented edges ``(i, j)`` to the form of the
    ``+1`` crossing; edges absent from the map get zero stress.
    """
    out = {}
    for (i, j), form in elementary_values.items():
        if not fw.has_edge(i, j):
            raise InvalidFramework(f"{(i, j)!r} is not an edge")
        d = fw.edge_vector(i, j)
        beta = form.vector()
        w = float(beta @ d) / float(d @ d)
        if np.linalg.norm(beta - w * d) > tol.eps_form * max(1.0, np.linalg.norm(beta)):
            raise ConsistencyError(f"form on {(i, j)!r} is not a multiple of d(p_i - p_j)")
        key = edge_key(i, j)
        if key in out and abs(out[key] - w) > tol.eps_form * max(1.0, abs(w)):
            raise ConsistencyError(f"conflicting values for edge {key!r}")
        out[key] = w
    for e in fw.edges:
        out.setdefault(e, 0.0)
    return Stress(out)


# -- geometry helpers -------------------------------------------------------------

def segment_distance(p0, p1, q0, q1) -> float:
    """Euclidean distance between segments [p0, p1] and [q0, q1] in R^n."""
    d1, d2, r = p1 - p0, q1 - q0, p0 - q0
    a, e, f = float(d1 @ d1), float(d2 @ d2), float(d2 @ r)
    c, b = float(d1 @ r), float(d1 @ d2)
    denom = a * e - b * b
    s = min(1.0, max(0.0, (b * f - c * e) / denom)) if denom > 1e-300 else 0.0
    t = (b * s + f) / e if e > 0 else 0.0
    if t < 0.0:
        t, s = 0.0, (min(1.0, max(0.0, -c / a)) if a > 0 else 0.0)
    elif t > 1.0:
        t, s = 1.0, (min(1.0, max(0.0, (b - c) / a)) if a > 0 else 0.0)
    return float(np.linalg.norm(p0 + s * d1 - (q0 + t * d2)))


def loop_distance(a: PolygonalLoop, b: PolygonalLoop) -> float:
    a0, a1 = a.segments()
    b0, b1 = b.segments()
    return min(segment_distance(a0[k], a1[k], b0[l], b1[l])
               for k in range(len(a0)) for l in range(len(b0)))


def loop_framework_distance(loop: PolygonalLoop, fw: Framework) -> float:
    a0, a1 = loop.segments()
    return min((segment_distance(a0[k], a1[k], fw.point(i), fw.point(j))
                for k in range(len(a0)) for i, j in fw.edges), default=np.inf)


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.normal(size=(3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


# -- linking numbers --------------------------------------------------------------

def gauss_linking_integral(a: PolygonalLoop, b: PolygonalLoop, order: int = 8,
                           subdivide: int = 1) -> float:
    """Gauss double integral by tensor Gauss-Legendre quadrature on segment pairs."""
    x, w = np.polynomial.legendre.leggauss(order)
    s, w = (x + 1) / 2, w / 2
    A, B = a, b
    for _ in range(max(0, subdivide - 1)):
        A, B = A.refined(), B.refined()
    a0, a1 = A.segments()
    b0, b1 = B.segments()
    da, db = a1 - a0, b1 - b0
    pa = a0[:, None, :] + s[None, :, None] * da[:, None, :]
    pb = b0[:, None, :] + s[None, :, None] * db[:, None, :]
    cr = np.cross(da[:, None, :], db[None, :, :])
    total = 0.0
    for k in range(len(a0)):
        r = pa[k][:, None, None, :] - pb[None, :, :, :]  # (q, Nb, q, 3)
        num = np.einsum("iljc,lc->ilj", r, cr[k])
        den = np.linalg.norm(r, axis=-1) ** 3
        total += float(np.einsum("i,ilj,j->", w, num / den, w))
    return total / (4 * np.pi)


def _projection_count(A: np.ndarray, B: np.ndarray, margin: float):
    """Signed crossings with A over B in the xy-projection, or None if degenerate."""
    a0, a1 = A, np.roll(A, -1, axis=0)
    b0, b1 = B, np.roll(B, -1, axis=0)
    r = (a1 - a0)[:, None, :2]
    s = (b1 - b0)[None, :, :2]
    q = b0[None, :, :2] - a0[:, None, :2]
    den = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    lr = np.linalg.norm(r, axis=-1)
    ls = np.linalg.norm(s, axis=-1)
    if np.any(lr < margin) or np.any(ls < margin):
        return None
    near_parallel = np.abs(den) <= margin * lr * ls
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (q[..., 0] * s[..., 1] - q[..., 1] * s[..., 0]) / den
        u = (q[..., 0] * r[..., 1] - q[..., 1] * r[..., 0]) / den
    # parallel pieces on a common projected line are a degenerate projection
    colinear = near_parallel & (np.abs(q[..., 0] * r[..., 1] - q[..., 1] * r[..., 0])
                                <= margin * lr * np.maximum(1.0, np.linalg.norm(q, axis=-1)))
    if np.any(colinear):
        return None
    ok = ~near_parallel
    close = ok & (((np.abs(t) < margin) | (np.abs(t - 1) < margin)) & (t > -margin) & (t < 1 + margin)
                  & (u > -margin) & (u < 1 + margin)
                  | ((np.abs(u) < margin) | (np.abs(u - 1) < margin)) & (u > -margin) & (u < 1 + margin)
                  & (t > -margin) & (t < 1 + margin))
    if np.any(close):
        return None
    hit = ok & (t > 0) & (t < 1) & (u > 0) & (u < 1)
    ks, ls_ = np.nonzero(hit)
    total = 0
    for k, l in zip(ks, ls_):
        za = a0[k, 2] + t[k, l] * (a1[k, 2] - a0[k, 2])
        zb = b0[l, 2] + u[k, l] * (b1[l, 2] - b0[l, 2])
        if za > zb:
            total += int(np.sign(den[k, l]))
    return total


def linking_number(a: PolygonalLoop, b: PolygonalLoop, seed: int = 0,
                   tol: Tolerances = DEFAULT_TOL) -> int:
    """Linking number from signed crossings of a generic projection."""
    scale = max(1.0, float(np.abs(a.points).max()), float(np.abs(b.points).max()))
    if loop_distance(a, b) <= tol.eps_geom * scale:
        raise LoopsIntersect("loops are not disjoint")
    rng = np.random.default_rng(seed)
    margin = 1e-9
    for _ in range(MAX_RETRIES):
        R = _random_rotation(rng)
        count = _projection_count(a.points @ R.T, b.points @ R.T, margin)
        if count is not None:
            return PROJECTION_SIGN * count
    raise DegenerateConfiguration("no generic projection found")


# -- cones and loop liftings -------------------------------------------------------

def cone_crossings(loop: PolygonalLoop, apex, segment, margin: float = 1e-9) -> int:
    """Signed count of fan triangles (apex, x_t, x_t+1) crossed by the open segment.

    Each crossing contributes ``CONE_SIGN * sign(det(x_t - apex, x_t+1 - apex, q2 - q1))``,
    which is ``lk(before, c) - lk(after, c)`` for the cone homotopy shrinking the loop
to the apex, ``c`` being any cycle that runs through the segment from ``q2`` to ``q1``.
    Raises :class:`NonTransversal` when the segment meets a fan line, the loop,
    or has an endpoint on the cone.
    """
    apex = as_vec(apex, 3)
    q1, q2 = (as_vec(q, 3) for q in segment)
    X0, X1 = loop.segments()
    U, V = X0 - apex, X1 - apex
    d = q2 - q1
    rhs = q1 - apex
    total = 0
    for u, v in zip(U, V):
        M = np.column_stack([u, v, -d])
        det = float(np.linalg.det(M))
        scale = np.linalg.norm(u) * np.linalg.norm(v) * np.linalg.norm(d)
        if abs(det) <= margin * scale:
            # segment parallel to the triangle's plane: only coplanar contact matters
            n = np.cross(u, v)
            nn = np.linalg.norm(n)
            if nn <= margin * np.linalg.norm(u) * np.linalg.norm(v):
                continue  # degenerate (flat) fan triangle has no interior
            if abs(float(n @ rhs)) <= margin * nn * max(1.0, np.linalg.norm(rhs)):
                raise NonTransversal("segment lies in the plane of a fan triangle")
            continue
        al, be, t = np.linalg.solve(M, rhs)
        inside_closed = (al > -margin and be > -margin and al + be < 1 + margin
                         and -margin < t < 1 + margin)
        if not inside_closed:
            continue
        if al < margin or be < margin or al + be > 1 - margin or t < margin or t > 1 - margin:
            raise NonTransversal("segment meets the cone boundary or the loop")
        total += int(np.sign(np.linalg.det(np.column_stack([u, v, d]))))
    return CONE_SIGN * total


def lifting_of_loop(fw: Framework, s: Stress, loop: PolygonalLoop, apex,
                    tol: Tolerances = DEFAULT_TOL, seed: int = 0,
                    check_equilibrium: bool = True) -> MForm:
    """Value of the differential lifting on the class of ``loop``.

    The cone from ``apex`` is the nulling homotopy; if it meets the framework
    non-transversally the apex is perturbed (at most ``MAX_RETRIES`` times).
    """
    if fw.dim != 3:
        raise DimensionError("loop liftings are implemented for frameworks in R^3")
    if check_equilibrium:
        require_self_stress(fw, s, tol)
    scale = max(1.0, fw.scale())
    if loop_framework_distance(loop, fw) <= tol.eps_geom * scale:
        raise LoopsIntersect("loop touches the framework")
    apex = as_vec(apex, 3)
    rng = np.random.default_rng(seed)
    trial = apex
    for _ in range(MAX_RETRIES):
        try:
            total = np.zeros(3)
            for i, j in fw.edges:
                k = cone_crossings(loop, trial, (fw.point(i), fw.point(j)))
                if k:
                    total += k * s.get((i, j)) * fw.edge_vector(i, j)
            return covector(total)
        except NonTransversal:
            trial = apex + 1e-3 * scale * rng.normal(size=3)
    raise NonTransversal("could not find a transversal cone apex")


def loop_crossing_word(fw: Framework, loop: PolygonalLoop, apex) -> CrossingWord:
    """Crossing word of the cone homotopy (one entry per crossing, edges as stored)."""
    entries = []
    for i, j in fw.edges:
        k = cone_crossings(loop, apex, (fw.point(i), fw.point(j)))
        sign = 1 if k > 0 else -1
        entries.extend([((i, j), sign)] * abs(k))
    return CrossingWord(entries)
