import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from difflift.errors import DegenerateConfiguration, DimensionError, NonSimplePath, NotEquilibrium
from difflift.grassmann import (AffineFlat, GrassmannPath, flat_distance, flat_meets_hull,
                                grassmann_lifting, path_crossings, trivalent_monodromy_identity,
                                trivalent_star)
from difflift.polytopal import (ForceLoad, PolytopalComplex, complex_from_framework,
                                forceload_from_stress)

from conftest import embed_k4_planar, k5, path_value_pair, random_line

EDGE = AffineFlat([(0, 0, 0), (1, 0, 0)])


def test_distance_magnitude_example():
    a, b, c, d = 0.3, 0.7, -0.2, 0.4
    line = AffineFlat([(a, b, 0), (c, d, 1)])
    expected = abs(b) / np.sqrt((c - a) ** 2 + (d - b) ** 2 + 1)
    assert abs(flat_distance(line, EDGE)) == pytest.approx(expected)


def test_distance_is_euclidean_for_skew_lines():
    line = AffineFlat([(0.5, 0, 2), (0.5, 1, 2)])
    assert abs(flat_distance(line, EDGE)) == pytest.approx(2.0)


def test_intersecting_flats_have_zero_distance():
    assert flat_distance(AffineFlat([(0.5, 0, 0), (0.5, 1, 1)]), EDGE) == pytest.approx(0, abs=1e-15)


def test_swapping_points_negates():
    line = AffineFlat([(0.3, 0.7, 0), (-0.2, 0.4, 1)])
    swapped = AffineFlat(line.points[::-1])
    assert flat_distance(swapped, EDGE) == pytest.approx(-flat_distance(line, EDGE))
    assert flat_distance(line, AffineFlat(EDGE.points[::-1])) == pytest.approx(-flat_distance(line, EDGE))


def test_distance_errors():
    with pytest.raises(DimensionError):
        flat_distance(AffineFlat([(0, 0, 0), (1, 0, 0), (0, 1, 0)]), EDGE)
    with pytest.raises(DegenerateConfiguration):
        AffineFlat([(0, 0, 0), (0, 0, 0)])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_distance_translation_invariant(seed):
    rng = np.random.default_rng(seed)
    a = AffineFlat(rng.normal(size=(2, 3)))
    b = AffineFlat(rng.normal(size=(2, 3)))
    v = rng.normal(size=3) * 5
    assert flat_distance(a.translated(v), b.translated(v)) == pytest.approx(flat_distance(a, b), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_distance_point_to_plane(seed):
    rng = np.random.default_rng(seed)
    plane = AffineFlat(rng.normal(size=(3, 3)))
    x = rng.normal(size=3)
    P = plane.points
    n = np.cross(P[1] - P[0], P[2] - P[0])
    expected = abs((x - P[0]) @ n) / np.linalg.norm(n)
    assert abs(flat_distance(AffineFlat([x]), plane)) == pytest.approx(expected, rel=1e-9, abs=1e-12)


def sweep():
    return GrassmannPath([[(0.5, -1, 0), (0.5, -1, 1)], [(0.5, 1, 0), (0.5, 1, 1)]])


def single_segment():
    return PolytopalComplex([(0, 0, 0), (1, 0, 0)], [(0, 1)], 1)


def test_sweep_single_event():
    (ev,) = path_crossings(sweep(), single_segment())
    assert ev.face == 0 and ev.mu == 1 and ev.t == pytest.approx(0.5, abs=1e-9)


def test_reversal_negates_mu():
    (ev,) = path_crossings(sweep().reversed(), single_segment())
    assert ev.mu == -1 and ev.t == pytest.approx(0.5, abs=1e-9)


def test_path_missing_segment_has_no_events():
    p = GrassmannPath([[(2.5, -1, 0), (2.5, -1, 1)], [(2.5, 1, 0), (2.5, 1, 1)]])
    assert path_crossings(p, single_segment()) == []


def test_back_and_forth_gives_opposite_mu():
    p = GrassmannPath([[(0.5, -1, 0), (0.5, -1, 1)], [(0.5, 1, 0), (0.5, 1, 1)],
                       [(0.5, -1, 0.2), (0.5, -1, 1.2)]])
    events = path_crossings(p, single_segment())
    assert [e.mu for e in events] == [1, -1]


def test_start_meeting_hull_rejected():
    p = GrassmannPath([[(0.5, -1, 0), (0.5, 1, 0)], [(0.5, 1, 1), (0.5, 2, 1)]])
    with pytest.raises(NonSimplePath):
        path_crossings(p, single_segment())


def test_crossing_through_vertex_rejected():
    p = GrassmannPath([[(1.0, -1, 0), (1.0, -1, 1)], [(1.0, 1, 0), (1.0, 1, 1)]])
    with pytest.raises(NonSimplePath):
        path_crossings(p, single_segment())


def test_hull_test():
    c = single_segment()
    assert flat_meets_hull(AffineFlat([(0.5, -1, 0), (0.5, 1, 0)]), c)
    assert not flat_meets_hull(AffineFlat([(0.5, -1, 1), (0.5, 1, 1)]), c)


def test_empty_path_lifting_is_zero():
    mf, w = trivalent_star(2 * np.pi / 3, 4 * np.pi / 3)
    p = GrassmannPath([[(0, 0, 1), (1, 0.37, 1)], [(0.5, 0.2, 2), (1.5, 0.57, 2)]])
    assert grassmann_lifting(p, mf, w) == 0.0


def test_unbalanced_load_rejected():
    mf, _ = trivalent_star(2 * np.pi / 3, 4 * np.pi / 3)
    p = GrassmannPath([[(0, 0, 1), (1, 0.37, 1)], [(0.5, 0.2, 2), (1.5, 0.57, 2)]])
    with pytest.raises(NotEquilibrium):
        grassmann_lifting(p, mf, ForceLoad([1, 2, 3]))


def test_identity_instance():
    assert abs(trivalent_monodromy_identity(2 * np.pi / 3, 4 * np.pi / 3, 0.3, 0.7, -0.2, 0.4, 1)) < 1e-9
    assert trivalent_monodromy_identity(1.0, 2.0, 0.3, 0.7, -0.2, 0.4, 0.0) == 0.0


def test_identity_domain():
    with pytest.raises(ValueError):
        trivalent_monodromy_identity(np.pi, 2.0, 0, 1, 0, 1)
    with pytest.raises(ValueError):
        trivalent_monodromy_identity(1.0, 1.0, 0, 1, 0, 1)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 2 * np.pi - 0.01), st.floats(0.01, 2 * np.pi - 0.01),
       st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-3, 3))
def test_identity_property(al, be, a, b, c, d, lam):
    if abs(al - np.pi) < 1e-6 or abs(be - np.pi) < 1e-6 or abs(al - be) < 1e-6:
        return
    assert abs(trivalent_monodromy_identity(al, be, a, b, c, d, lam)) < 1e-9


def star_loop(r=0.7, phase=0.3, n=12):
    l0 = [(2, 2, 1), (3, 2.5, 1)]
    ring = [[(r * np.cos(t), r * np.sin(t), 0), (r * np.cos(t), r * np.sin(t), 1)]
            for t in phase + np.linspace(0, 2 * np.pi, n + 1)]
    ring[-1] = ring[0]
    return GrassmannPath([l0] + ring + [l0])


def test_closed_loop_around_star_centre():
    mf, w = trivalent_star(2 * np.pi / 3, 4 * np.pi / 3)
    events = path_crossings(star_loop(), mf)
    assert abs(grassmann_lifting(star_loop(), mf, w)) < 1e-8


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 2.9), st.floats(3.3, 6.1), st.floats(0.3, 1.5), st.floats(0, 6.28))
def test_closed_loops_on_random_stars(al, be, r, phase):
    mf, w = trivalent_star(al, be, 1.3)
    try:
        val = grassmann_lifting(star_loop(r, phase), mf, w)
    except NonSimplePath:
        return
    assert abs(val) < 1e-8


@pytest.mark.parametrize("builder", [embed_k4_planar, k5])
def test_path_independence_on_bounded_frameworks(builder):
    fw, s = builder()
    c = complex_from_framework(fw)
    w = forceload_from_stress(fw, s)
    rng = np.random.default_rng(99)
    for _ in range(8):
        final = random_line(rng)
        a, b = path_value_pair(rng, c, w, final)
        assert abs(a - b) < 1e-8


def test_lifting_vanishes_on_final_flat_far_away():
    # any path ending outside the hull accumulates crossings whose distances cancel
    fw, s = k5()
    c = complex_from_framework(fw)
    w = forceload_from_stress(fw, s)
    rng = np.random.default_rng(5)
    final = [(4, 4, 4), (5, 4, 4)]
    assert not flat_meets_hull(AffineFlat(final), c)
    a, b = path_value_pair(rng, c, w, final)
    assert abs(a) < 1e-8 and abs(b) < 1e-8
