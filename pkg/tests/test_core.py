import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from difflift.core import (DEFAULT_TOL, MForm, Tolerances, covector, gram_volume, hodge_star,
                           signed_det, wedge)
from difflift.errors import DimensionError

dx, dy, dz = (MForm(3, 1, {(k,): 1.0}) for k in (1, 2, 3))


def test_wedge_basis_product():
    assert wedge(dx, dy).coeffs == {(1, 2): 1.0}


def test_wedge_self_is_zero():
    assert wedge(dx, dx).is_zero()


def test_wedge_sign_rule():
    assert wedge(dy, dx).allclose(-wedge(dx, dy))


def test_wedge_errors():
    with pytest.raises(DimensionError):
        wedge(dx, MForm(2, 1, {(1,): 1}))
    with pytest.raises(DimensionError):
        wedge(wedge(dx, dy), wedge(dy, dz))


def test_unsorted_keys_normalise_with_sign():
    f = MForm(3, 2, {(2, 1): 2.0, (1, 1): 5.0})
    assert f.coeffs == {(1, 2): -2.0}
    assert f[(2, 1)] == 2.0


def test_hodge_plane_rule():
    a = MForm(2, 1, {(1,): 2.0, (2,): 3.0})
    assert np.allclose(hodge_star(a).vector(), [-3.0, 2.0])


def test_hodge_r3_and_double_star():
    assert hodge_star(wedge(dx, dy)).allclose(dz)
    d = MForm(2, 1, {(1,): 1.0})
    assert hodge_star(hodge_star(d)).allclose(-d)


def test_hodge_scalar_to_volume():
    assert hodge_star(MForm.scalar(3, 2.0)).coeffs == {(1, 2, 3): 2.0}


def test_gram_volume_examples():
    assert gram_volume([(1, 0, 0)]) == pytest.approx(1)
    assert gram_volume([(1, 0, 0), (0, 2, 0)]) == pytest.approx(2)
    assert gram_volume([(1, 0, 0), (2, 0, 0)]) == pytest.approx(0, abs=1e-12)
    with pytest.raises(DimensionError):
        gram_volume([])


def test_signed_det_examples():
    assert signed_det([(1, 0), (0, 1)]) == pytest.approx(1)
    assert signed_det([(0, 1), (1, 0)]) == pytest.approx(-1)
    assert signed_det([(1, 0, 0), (0, 1, 0), (0, 0, 1)]) == pytest.approx(1)
    with pytest.raises(DimensionError):
        signed_det([(1, 0, 0), (0, 1, 0)])


def test_tolerances_positive_and_override():
    with pytest.raises(ValueError):
        Tolerances(eps_geom=0)
    t = DEFAULT_TOL.with_(eps_form=1e-6, eps_geom=None)
    assert t.eps_form == 1e-6 and t.eps_geom == DEFAULT_TOL.eps_geom


def test_str_uses_xyz_names():
    assert str(covector([1.5, 0, -2])) == "+1.5 dx -2 dz"
    assert str(MForm.zero(3, 1)) == "0"


# -- properties ----------------------------------------------------------------------

coef = st.floats(-10, 10, allow_nan=False)


@st.composite
def forms(draw, n=4, degree=None):
    m = draw(st.integers(0, n)) if degree is None else degree
    keys = list(itertools.combinations(range(1, n + 1), m))
    vals = draw(st.lists(coef, min_size=len(keys), max_size=len(keys)))
    return MForm(n, m, dict(zip(keys, vals)))


@settings(max_examples=60, deadline=None)
@given(forms(), forms(), forms(), coef)
def test_wedge_graded_commutative_and_bilinear(a, b, c, lam):
    if a.degree + b.degree <= 4:
        sign = (-1) ** (a.degree * b.degree)
        assert (a ^ b).allclose(sign * (b ^ a), 1e-9)
    if a.degree + c.degree <= 4 and b.degree == a.degree:
        lhs = (a * lam + b) ^ c
        rhs = (a ^ c) * lam + (b ^ c)
        assert lhs.allclose(rhs, 1e-7)


@settings(max_examples=60, deadline=None)
@given(forms(n=2, degree=1), forms(n=2, degree=1), coef)
def test_hodge_linear_and_rotation_in_plane(a, b, lam):
    assert hodge_star(a * lam + b).allclose(hodge_star(a) * lam + hodge_star(b), 1e-7)
    u, v = a.vector()
    assert np.allclose(hodge_star(a).vector(), [-v, u])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_gram_volume_rotation_invariant(seed, k):
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(k, 3))
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert gram_volume(V @ Q.T) == pytest.approx(gram_volume(V), abs=1e-9)
