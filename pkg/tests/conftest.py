import numpy as np
import pytest

from difflift.framework import Framework, Stress
from difflift.homotopy import PolygonalLoop
from difflift.polytopal import parallel_prism_complex

S3 = np.sqrt(3) / 2


def k4_planar():
    P = {1: (0, 0), 2: (1, 0), 3: (-0.5, S3), 4: (-0.5, -S3)}
    fw = Framework(P, [(1, 2), (1, 3), (1, 4), (2, 3), (3, 4), (2, 4)])
    s = Stress({(1, 2): 3, (1, 3): 3, (1, 4): 3, (2, 3): -1, (3, 4): -1, (2, 4): -1})
    return fw, s


def k4_nonplanar():
    P = {1: (1, 0), 2: (0, 1), 3: (-1, 0), 4: (0, -1)}
    fw = Framework(P, [(1, 2), (2, 3), (3, 4), (1, 4), (1, 3), (2, 4)])
    s = Stress({(1, 2): -1, (2, 3): -1, (3, 4): -1, (1, 4): -1, (1, 3): 1, (2, 4): 1})
    return fw, s


def prism():
    P = {1: (-1, -1), 2: (3, -1), 3: (3, 1), 4: (-1, 1), 5: (0, 0), 6: (2, 0)}
    W = {(1, 2): -1, (3, 4): -1, (2, 3): -2, (1, 4): -2,
         (1, 5): 4, (4, 5): 4, (2, 6): 4, (3, 6): 4, (5, 6): 4}
    return Framework(P, list(W)), Stress(W)


K5_POINTS = {1: (0, 0, 0), 2: (1, 0, 0), 3: (0, 1, 0), 4: (0, 0, 1), 5: (1, 1, 1)}
K5_OMEGA = [[0, 2, 2, 2, -2], [2, 0, -1, -1, 1], [2, -1, 0, -1, 1],
            [2, -1, -1, 0, 1], [-2, 1, 1, 1, 0]]
# beta[i][j] as coefficient vectors of (dx, dy, dz)
K5_BETA = {
    (1, 2): (-2, 0, 0), (1, 3): (0, -2, 0), (1, 4): (0, 0, -2), (1, 5): (2, 2, 2),
    (2, 1): (2, 0, 0), (2, 3): (-1, 1, 0), (2, 4): (-1, 0, 1), (2, 5): (0, -1, -1),
    (3, 1): (0, 2, 0), (3, 2): (1, -1, 0), (3, 4): (0, -1, 1), (3, 5): (-1, 0, -1),
    (4, 1): (0, 0, 2), (4, 2): (1, 0, -1), (4, 3): (0, 1, -1), (4, 5): (-1, -1, 0),
    (5, 1): (-2, -2, -2), (5, 2): (0, 1, 1), (5, 3): (1, 0, 1), (5, 4): (1, 1, 0),
}


def k5():
    E = [(i, j) for i in range(1, 6) for j in range(i + 1, 6)]
    fw = Framework(K5_POINTS, E)
    s = Stress({e: K5_OMEGA[e[0] - 1][e[1] - 1] for e in E})
    return fw, s


def k5_gamma1():
    """Square around the midpoint of p1p2 in the plane x = 1/2."""
    return PolygonalLoop([(0.5, -0.1, 0.1), (0.5, 0.1, 0.1), (0.5, 0.1, -0.1), (0.5, -0.1, -0.1)])


def k5_gamma2():
    """Square near p2 pierced by p2p4 and p2p5 only."""
    m = np.array([0.3, -0.3, 1.0])
    m /= np.linalg.norm(m)
    a = np.cross(m, [0.0, 0.0, 1.0])
    a /= np.linalg.norm(a)
    b = np.cross(m, a)
    c = np.array([1.0, 0, 0]) + 0.1 * m
    corners = [c + 0.3 * (x * a + y * b) for x, y in [(-1, 1), (1, 1), (1, -1), (-1, -1)]]
    return PolygonalLoop(corners)


def hopf_pair(n=48):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    A = PolygonalLoop(np.c_[np.cos(t), np.sin(t), 0 * t])
    B = PolygonalLoop(np.c_[1 + np.cos(t), 0 * t, np.sin(t)])
    return A, B


CUBE_SHIFT = np.array([0.1, -0.05, 0.13])
CUBE_FACES = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]


def cube_vertices():
    V = np.array([[x, y, z] for x in (-0.5, 0.5) for y in (-0.5, 0.5) for z in (-0.5, 0.5)])
    return V - CUBE_SHIFT


def cube_pair(scale=2.0):
    return parallel_prism_complex(cube_vertices(), CUBE_FACES, scale)


def random_generic_framework(rng, n_vertices, dim, p_edge=0.8):
    """Random points with a random dense edge set (at least a spanning path)."""
    while True:
        pts = rng.uniform(-1, 1, size=(n_vertices, dim))
        d = np.linalg.norm(pts[:, None] - pts[None], axis=-1) + np.eye(n_vertices)
        if d.min() > 0.05:
            break
    edges = [(i, i + 1) for i in range(n_vertices - 1)]
    for i in range(n_vertices):
        for j in range(i + 2, n_vertices):
            if rng.random() < p_edge:
                edges.append((i, j))
    return Framework({i: pts[i] for i in range(n_vertices)}, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def embed_k4_planar():
    """Planar K4 lifted into z = 0 of R^3."""
    fw, s = k4_planar()
    return Framework({v: (*p, 0.0) for v, p in fw.vertices.items()}, fw.edges), s


def random_line(rng, spread=1.2):
    a, b, c, d = rng.normal(size=4) * spread
    z = rng.uniform(-1, 1)
    return [(a, b, z), (c, d, z + 1)]


def random_simple_path(rng, target, final, max_middle=3):
    """Random piecewise-linear path of lines from a hull-avoiding start to ``final``."""
    from difflift.grassmann import AffineFlat, GrassmannPath, flat_meets_hull

    while True:
        start = random_line(rng)
        if not flat_meets_hull(AffineFlat(start), target):
            break
    middle = [random_line(rng) for _ in range(int(rng.integers(1, max_middle + 1)))]
    return GrassmannPath([start, *middle, final])


def path_value_pair(rng, target, w, final, retries=50):
    """Liftings along two independent random paths to ``final`` (resampling non-simple paths)."""
    from difflift.errors import NonSimplePath
    from difflift.grassmann import grassmann_lifting

    out = []
    for _ in range(retries):
        try:
            out.append(grassmann_lifting(random_simple_path(rng, target, final), target, w))
        except NonSimplePath:
            continue
        if len(out) == 2:
            return out
    raise RuntimeError("could not draw two simple paths")


CRITERIA: dict[int, bool] = {}


def record_criterion(n: int, ok: bool):
    CRITERIA[n] = ok
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if CRITERIA[n] else 'FAIL'}")
