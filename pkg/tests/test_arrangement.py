import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from difflift.arrangement import build_chamber_complex, locate_chamber
from difflift.core import signed_det
from difflift.errors import CollinearOverlap, PointOnFramework
from difflift.framework import Framework

from conftest import k4_nonplanar, k4_planar, prism, random_generic_framework


@pytest.mark.parametrize("builder,count", [(k4_planar, 4), (k4_nonplanar, 5), (prism, 5)])
def test_chamber_counts(builder, count):
    fw, _ = builder()
    cc = build_chamber_complex(fw)
    assert len(cc) == count
    assert sum(not c.bounded for c in cc.chambers) == 1
    assert cc.is_connected()


def test_locate_far_point_is_unbounded():
    cc = build_chamber_complex(k4_planar()[0])
    assert locate_chamber(cc, (10, 10)) == cc.unbounded_id


def test_locate_k4_left_chamber():
    fw, _ = k4_planar()
    cc = build_chamber_complex(fw)
    ch = cc.chambers[locate_chamber(cc, (-0.05, 0))]
    corners = {tuple(np.round(p, 9)) for p in ch.boundary}
    expected = {tuple(np.round(fw.point(v), 9)) for v in (1, 3, 4)}
    assert corners == expected


def test_locate_prism_top_chamber():
    fw, _ = prism()
    cc = build_chamber_complex(fw)
    ch = cc.chambers[locate_chamber(cc, (1, 0.5))]
    corners = {tuple(np.round(p, 9)) for p in ch.boundary}
    assert corners == {(3.0, 1.0), (-1.0, 1.0), (0.0, 0.0), (2.0, 0.0)}


def test_point_on_edge_rejected():
    cc = build_chamber_complex(k4_planar()[0])
    with pytest.raises(PointOnFramework):
        locate_chamber(cc, (0.5, 0))


def test_overlapping_segments_rejected():
    fw = Framework({1: (0, 0), 2: (2, 0), 3: (1, 0), 4: (3, 0)}, [(1, 2), (3, 4)])
    with pytest.raises(CollinearOverlap):
        build_chamber_complex(fw)


def test_nonplanar_refinement_adds_centre_node():
    cc = build_chamber_complex(k4_nonplanar()[0])
    assert any(np.allclose(p, 0) for p in cc.nodes.values())
    assert len(cc.subedges) == 8


def test_point_contact_is_not_adjacency():
    # two triangles touching at a single vertex
    fw = Framework({1: (0, 0), 2: (1, 1), 3: (1, -1), 4: (-1, 1), 5: (-1, -1)},
                   [(1, 2), (2, 3), (1, 3), (1, 4), (4, 5), (1, 5)])
    cc = build_chamber_complex(fw)
    assert len(cc) == 3
    bounded = set(cc.bounded_ids)
    assert not any({a.a, a.b} == bounded for a in cc.adjacencies)


def test_sliver_chamber_is_kept():
    # three crossings within 1e-5 of vertex 3 bound a chamber of area ~1e-11
    P = [(-0.022784376963219444, -0.3170772091280165), (-0.6449667784914452, -0.7092091963683442),
         (-0.8777712396134618, 0.650875087544418), (-0.3212342364290419, -0.5051812283450656),
         (0.7571284381252821, -0.7231948939511856), (-0.727860888436173, -0.47476433219713754)]
    E = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (1, 5),
         (2, 4), (3, 5)]
    cc = build_chamber_complex(Framework(dict(enumerate(P)), E))
    assert len(cc) == 15 and cc.euler_characteristic() == 2
    assert min(ch.area for ch in cc.chambers if ch.bounded) < 1e-9
    for ch in cc.chambers:
        assert locate_chamber(cc, ch.sample) == ch.id


def _check_geometry(cc):
    assert cc.euler_characteristic() == 2
    for adj in cc.adjacencies:
        p, q = adj.segment
        d = (q - p) / np.linalg.norm(q - p)
        assert abs(np.linalg.norm(adj.normal) - 1) < 1e-9
        assert abs(adj.normal @ d) < 1e-9
        assert abs(signed_det([adj.normal, d])) > 0.5
        assert np.allclose(adj.reversed().normal, -adj.normal)


@pytest.mark.parametrize("builder", [k4_planar, k4_nonplanar, prism])
def test_euler_and_normals_on_examples(builder):
    _check_geometry(build_chamber_complex(builder()[0]))


def test_normals_point_from_a_to_b():
    fw, _ = prism()
    cc = build_chamber_complex(fw)
    for adj in cc.adjacencies:
        mid = 0.5 * (adj.segment[0] + adj.segment[1])
        h = 1e-4
        assert locate_chamber(cc, mid + h * adj.normal) == adj.b
        assert locate_chamber(cc, mid - h * adj.normal) == adj.a


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_random_connected_arrangements(seed):
    rng = np.random.default_rng(seed)
    fw = random_generic_framework(rng, int(rng.integers(3, 8)), 2)
    cc = build_chamber_complex(fw)
    _check_geometry(cc)
    assert cc.is_connected()
    for ch in cc.chambers:
        assert locate_chamber(cc, ch.sample) == ch.id
