"""Constant exterior forms on R^n, Hodge star, volume predicates and tolerances.

Forms are stored sparsely: a map from strictly increasing index tuples
(1-based, so ``(1, 2)`` is ``dx1 ^ dx2``) to real coefficients.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "MForm",
    "covector",
    "wedge",
    "hodge_star",
    "gram_volume",
    "signed_det",
    "as_vec",
]


@dataclass(frozen=True)
class Tolerances:
    eps_geom: float = 1e-9
    eps_form: float = 1e-8
    eps_rank: float = 1e-10

    def __post_init__(self):
        for name in ("eps_geom", "eps_form", "eps_rank"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    def with_(self, **changes) -> "Tolerances":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)


DEFAULT_TOL = Tolerances()


def as_vec(x, dim: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise DimensionError("vector must have at least one coordinate")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite coordinates: {x!r}")
    if dim is not None and v.size != dim:
        raise DimensionError(f"expected a vector in R^{dim}, got length {v.size}")
    return v


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an index repeats."""
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


_VAR_NAMES = {2: ("x", "y"), 3: ("x", "y", "z")}


@dataclass(frozen=True)
class MForm:
    """A constant differential m-form on R^n.

    Keys passed at construction may be unsorted; they are normalised to
    increasing order with the corresponding permutation sign, repeated
    indices give zero, and zero coefficients are dropped.
    """

    ambient_dim: int
    degree: int
    coeffs: Mapping[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        n, m = self.ambient_dim, self.degree
        if n < 1:
            raise DimensionError("ambient dimension must be positive")
        if not 0 <= m <= n:
            raise DimensionError(f"degree {m} out of range for R^{n}")
        clean: dict[tuple[int, ...], float] = {}
        for key, val in dict(self.coeffs).items():
            key = tuple(int(k) for k in key)
            if len(key) != m:
                raise DimensionError(f"key {key} has length != degree {m}")
            if any(k < 1 or k > n for k in key):
                raise DimensionError(f"index out of range in {key}")
            sign = _perm_sign(key)
            if sign == 0:
                continue
            skey = tuple(sorted(key))
            clean[skey] = clean.get(skey, 0.0) + sign * float(val)
        clean = {k: v for k, v in clean.items() if v != 0.0}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, n: int, m: int) -> "MForm":
        return cls(n, m, {})

    @classmethod
    def scalar(cls, n: int, value: float = 1.0) -> "MForm":
        return cls(n, 0, {(): value})

    @classmethod
    def from_vector(cls, v) -> "MForm":
        """The 1-form ``dv = v1 dx1 + ... + vn dxn``."""
        v = as_vec(v)
        return cls(v.size, 1, {(i + 1,): float(c) for i, c in enumerate(v)})

    # -- accessors ----------------------------------------------------
    def __getitem__(self, key) -> float:
        if isinstance(key, int):
            key = (key,)
        key = tuple(key)
        sign = _perm_sign(key)
        if sign == 0:
            return 0.0
        return sign * self.coeffs.get(tuple(sorted(key)), 0.0)

    def vector(self) -> np.ndarray:
        """Coefficient vector of a 1-form."""
        if self.degree != 1:
            raise DimensionError("vector() is only defined for 1-forms")
        out = np.zeros(self.ambient_dim)
        for (i,), c in self.coeffs.items():
            out[i - 1] = c
        return out

    def to_array(self) -> np.ndarray:
        """Dense coefficients over all increasing tuples in lexicographic order."""
        keys = itertools.combinations(range(1, self.ambient_dim + 1), self.degree)
        return np.array([self.coeffs.get(k, 0.0) for k in keys])

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.coeffs.values()))

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.coeffs.values())

    def allclose(self, other: "MForm", tol: float = DEFAULT_TOL.eps_form) -> bool:
        self._check_compatible(other)
        return (self - other).is_zero(tol)

    # -- arithmetic ---------------------------------------------------
    def _check_compatible(self, other: "MForm"):
        if not isinstance(other, MForm):
            raise TypeError(f"expected MForm, got {type(other).__name__}")
        if other.ambient_dim != self.ambient_dim or other.degree != self.degree:
            raise DimensionError(
                f"incompatible forms: ({self.ambient_dim},{self.degree}) vs "
                f"({other.ambient_dim},{other.degree})"
            )

    def __add__(self, other: "MForm") -> "MForm":
        self._check_compatible(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return MForm(self.ambient_dim, self.degree, out)

    def __neg__(self) -> "MForm":
        return MForm(self.ambient_dim, self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "MForm") -> "MForm":
        return self + (-other)

    def __mul__(self, c: float) -> "MForm":
        c = float(c)
        return MForm(self.ambient_dim, self.degree, {k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "MForm":
        return self * (1.0 / float(c))

    def __xor__(self, other: "MForm") -> "MForm":
        return wedge(self, other)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        names = _VAR_NAMES.get(self.ambient_dim)
        parts = []
        for key, c in self.coeffs.items():
            if names:
                basis = "^".join("d" + names[i - 1] for i in key)
            else:
                basis = "^".join(f"dx{i}" for i in key)
            parts.append(f"{c:+.6g}" + (f" {basis}" if basis else ""))
        return " ".join(parts)


def covector(v) -> MForm:
    return MForm.from_vector(v)


def wedge(a: MForm, b: MForm) -> MForm:
    """Exterior product; signs come from merging the sorted index tuples."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError("wedge of forms on different spaces")
    if a.degree + b.degree > a.ambient_dim:
        raise DimensionError("degree overflow in wedge product")
    out: dict[tuple[int, ...], float] = {}
    for ka, ca in a.coeffs.items():
        for kb, cb in b.coeffs.items():
            key = ka + kb
            sign = _perm_sign(key)
            if sign == 0:
                continue
            skey = tuple(sorted(key))
            out[skey] = out.get(skey, 0.0) + sign * ca * cb
    return MForm(a.ambient_dim, a.degree + b.degree, out)


def hodge_star(a: MForm) -> MForm:
    """Hodge star with respect to the standard orientation of R^n.

    ``dx_I`` maps to ``sign(I, I^c) dx_{I^c}``, so in the plane
    ``a dx + b dy`` goes to ``-b dx + a dy``.
    """
    n = a.ambient_dim
    out: dict[tuple[int, ...], float] = {}
    for key, c in a.coeffs.items():
        rest = tuple(i for i in range(1, n + 1) if i not in key)
        out[rest] = out.get(rest, 0.0) + _perm_sign(key + rest) * c
    return MForm(n, n - a.degree, out)


def gram_volume(vectors: Iterable) -> float:
    """Unsigned k-volume of the parallelotope spanned by ``vectors``."""
    vs = [as_vec(v) for v in vectors]
    if not vs:
        raise DimensionError("gram_volume needs at least one vector")
    dim = vs[0].size
    if any(v.size != dim for v in vs):
        raise DimensionError("vectors live in different dimensions")
    if len(vs) > dim:
        return 0.0
    A = np.column_stack(vs)
    G = A.T @ A
    det = float(np.linalg.det(G))
    return math.sqrt(det) if det > 0 else 0.0


def signed_det(vectors: Sequence) -> float:
    """Determinant of the square matrix whose columns are ``vectors``."""
    vs = [as_vec(v) for v in vectors]
    n = len(vs)
    if n == 0 or any(v.size != n for v in vs):
        raise DimensionError("signed_det needs n vectors in R^n")
    return float(np.linalg.det(np.column_stack(vs)))
