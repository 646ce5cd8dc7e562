import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from difflift.core import covector
from difflift.errors import ConsistencyError, DimensionError, InvalidFramework, LoopsIntersect
from difflift.framework import Framework, Stress, equilibrium_residuals, self_stress_basis
from difflift.homotopy import (CrossingWord, PolygonalLoop, cone_crossings, elementary_forms,
                               elementary_lifting_form, gauss_linking_integral, lifting_of_loop,
                               lifting_of_word, linking_number, loop_crossing_word,
                               recover_stress_nd, vertex_monodromy)

from conftest import K5_BETA, hopf_pair, k4_planar, k5, k5_gamma1, k5_gamma2, random_generic_framework


def circle(center, normal_axis, r=1.0, n=40):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    c, s = r * np.cos(t), r * np.sin(t)
    z = 0 * t
    pts = {2: np.c_[c, s, z], 1: np.c_[c, z, s], 0: np.c_[z, c, s]}[normal_axis]
    return PolygonalLoop(pts + np.asarray(center, dtype=float))


# -- forms and words -------------------------------------------------------------

def test_k5_beta_matrix():
    fw, s = k5()
    forms = elementary_forms(fw, s)
    for key, vec in K5_BETA.items():
        assert np.allclose(forms[key].vector(), vec, atol=1e-12), key


def test_negative_sign_negates():
    fw, s = k5()
    assert elementary_lifting_form(fw, s, (2, 4), -1).allclose(-elementary_lifting_form(fw, s, (2, 4)))


def test_unknown_edge_rejected():
    fw = Framework({1: (0, 0, 0), 2: (1, 0, 0), 3: (0, 1, 0)}, [(1, 2)])
    with pytest.raises(InvalidFramework):
        elementary_lifting_form(fw, Stress(), (1, 3))


def test_k5_words():
    fw, s = k5()
    assert np.allclose(lifting_of_word(fw, s, [((1, 2), 1)]).vector(), [-2, 0, 0])
    assert np.allclose(lifting_of_word(fw, s, [((2, 4), 1), ((2, 5), 1)]).vector(), [-1, -1, 0])
    assert lifting_of_word(fw, s, []).is_zero()


def test_word_additive_and_inverse_cancels():
    fw, s = k5()
    w1 = CrossingWord([((1, 2), 1), ((3, 5), -1)])
    w2 = CrossingWord([((2, 4), 1), ((4, 5), 1)])
    total = lifting_of_word(fw, s, w1 + w2)
    assert total.allclose(lifting_of_word(fw, s, w1) + lifting_of_word(fw, s, w2))
    assert lifting_of_word(fw, s, w1 + w1.inverse()).is_zero(1e-12)


def test_bad_word_entries():
    with pytest.raises(ValueError):
        CrossingWord([((1, 2), 2)])


def test_k5_vertex_monodromy_zero():
    fw, s = k5()
    for v in fw.vertices:
        assert vertex_monodromy(fw, s, v).is_zero(1e-12)


def test_vertex_monodromy_single_edge():
    fw = Framework({1: (0, 0, 0), 2: (1, 2, 3)}, [(1, 2)])
    m = vertex_monodromy(fw, Stress({(1, 2): 1}), 1)
    assert np.allclose(m.vector(), [-1, -2, -3])
    assert vertex_monodromy(fw, Stress(), 2).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_monodromy_matches_residuals(seed):
    rng = np.random.default_rng(seed)
    fw = random_generic_framework(rng, int(rng.integers(4, 8)), 3)
    s = Stress({e: rng.normal() for e in fw.edges})
    res = equilibrium_residuals(fw, s)
    for v in fw.vertices:
        assert np.allclose(vertex_monodromy(fw, s, v).vector(), res[v])


def test_recover_k5():
    fw, s = k5()
    back = recover_stress_nd(fw, elementary_forms(fw, s))
    assert np.allclose(back.as_vector(fw), s.as_vector(fw))
    zero = {e: covector(np.zeros(3)) for e in fw.edges}
    assert recover_stress_nd(fw, zero).max_abs() == 0


def test_recover_rejects_non_parallel():
    fw, _ = k5()
    with pytest.raises(ConsistencyError):
        recover_stress_nd(fw, {(1, 2): covector([1.0, 1.0, 0.0])})


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_recover_random_round_trip(seed):
    rng = np.random.default_rng(seed)
    fw = random_generic_framework(rng, int(rng.integers(5, 8)), 3, p_edge=0.95)
    for b in self_stress_basis(fw):
        back = recover_stress_nd(fw, elementary_forms(fw, b))
        assert np.allclose(back.as_vector(fw), b.as_vector(fw), atol=1e-9)


def test_planar_case_matches_chamber_jumps():
    from difflift.lifting2d import differential_lifting_2d
    fw, s = k4_planar()
    dl = differential_lifting_2d(fw, s)
    for adj in dl.complex.adjacencies:
        i, j = adj.edge
        v = fw.edge_vector(i, j)
        sign = 1 if adj.normal[0] * v[1] - adj.normal[1] * v[0] > 0 else -1
        assert (dl[adj.b] - dl[adj.a]).allclose(elementary_lifting_form(fw, s, (i, j), sign), 1e-9)


# -- linking numbers ----------------------------------------------------------------

def test_hopf_signs():
    a, b = hopf_pair()
    assert linking_number(a, b) == -1
    assert linking_number(a, b.reversed()) == 1
    assert linking_number(b, a) == -1


def test_gauss_oracle_agrees():
    a, b = hopf_pair()
    g = gauss_linking_integral(a, b)
    assert abs(g - linking_number(a, b)) < 0.01
    assert abs(gauss_linking_integral(a, b.reversed()) - 1) < 0.01


def test_unlinked_circles():
    a = circle((0, 0, 0), 2)
    b = circle((5, 0, 0), 1)
    assert linking_number(a, b) == 0
    assert abs(gauss_linking_integral(a, b)) < 0.01


def test_touching_loops_rejected():
    a = circle((0, 0, 0), 2)
    with pytest.raises(LoopsIntersect):
        linking_number(a, a.transformed(t=(0.5, 0, 0)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_linking_stable_under_rigid_motion_and_noise(seed):
    rng = np.random.default_rng(seed)
    a, b = hopf_pair(36)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    t = rng.normal(size=3)
    a2 = PolygonalLoop(a.transformed(Q, t).points + 0.02 * rng.normal(size=a.points.shape))
    b2 = PolygonalLoop(b.transformed(Q, t).points + 0.02 * rng.normal(size=b.points.shape))
    assert linking_number(a2, b2, seed=seed) == -1


# -- cones and loops -------------------------------------------------------------------

def test_cone_single_crossing_and_far_zero():
    loop = circle((0, 0, 0), 2, r=0.5)
    seg = ((0, 0, -1), (0, 0, 1))
    assert abs(cone_crossings(loop, (3, 1, 2), seg)) == 1
    assert cone_crossings(loop.reversed(), (3, 1, 2), seg) == -cone_crossings(loop, (3, 1, 2), seg)
    assert cone_crossings(loop, (3, 1, 2), ((10, 0, -1), (10, 0, 1))) == 0


@pytest.mark.parametrize("apex", [(3, 2, 2.5), (1, -4, -3), (0.1, 0.2, 6)])
def test_cone_count_equals_linking_change(apex):
    # summed over a closed cycle, the cone count is lk against the reversed cycle
    loop = circle((0, 0, 0), 2, r=0.5)
    T = [(0, 0, -1), (0, 0, 1), (-20, -20, 0.3)]
    tri = PolygonalLoop(T[::-1])
    total = sum(cone_crossings(loop, apex, (T[k], T[(k + 1) % 3])) for k in range(3))
    assert total == linking_number(loop, tri) == -1
    assert abs(gauss_linking_integral(loop, tri, subdivide=4) + 1) < 0.01


def test_k5_gamma1():
    fw, s = k5()
    assert np.allclose(lifting_of_loop(fw, s, k5_gamma1(), (5, 5, 5)).vector(), [-2, 0, 0])
    # (5,5,5) lies on the line of p1p5, so the word is read from a generic apex
    word = loop_crossing_word(fw, k5_gamma1(), (5, 5.2, 4.9))
    assert word.entries == (((1, 2), 1),)
    assert lifting_of_word(fw, s, word).allclose(lifting_of_loop(fw, s, k5_gamma1(), (5, 5, 5)))


def test_k5_gamma1_links_triangle_negatively():
    tri = PolygonalLoop([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    assert linking_number(k5_gamma1(), tri) == -1
    assert linking_number(k5_gamma1(), tri.reversed()) == 1


def test_k5_gamma2():
    fw, s = k5()
    for apex in [(5, 5, 5), (-4, 3, 6)]:
        assert np.allclose(lifting_of_loop(fw, s, k5_gamma2(), apex).vector(), [-1, -1, 0])


def test_contractible_loop_is_zero():
    fw, s = k5()
    tiny = PolygonalLoop([(10, 10, 10), (10.1, 10, 10), (10, 10.1, 10)])
    assert lifting_of_loop(fw, s, tiny, (0.3, 0.2, 5)).is_zero(1e-12)


def test_loop_needs_3d():
    fw, s = k4_planar()
    with pytest.raises(DimensionError):
        lifting_of_loop(fw, s, k5_gamma1(), (5, 5, 5))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_loop_lifting_independent_of_apex_and_refinement(seed):
    rng = np.random.default_rng(seed)
    fw, s = k5()
    loop = k5_gamma2() if seed % 2 else k5_gamma1()
    ref = lifting_of_loop(fw, s, loop, (5, 5, 5))
    apex = rng.uniform(-6, 6, size=3)
    if np.linalg.norm(apex - 0.5) < 2:
        apex += 4
    assert lifting_of_loop(fw, s, loop, apex, seed=seed).allclose(ref, 1e-8)
    assert lifting_of_loop(fw, s, loop.refined(), apex, seed=seed).allclose(ref, 1e-8)
