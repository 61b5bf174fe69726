"""Shared fixtures: small worked complexes and random generators."""

from __future__ import annotations

import numpy as np
import pytest

from conmat import CellComplex, GradedComplex, Poset
from conmat.cubical import grid_complex
from conmat.oracle import assemble


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    from conmat._kernels import warmup

    warmup()


# -- small worked complexes ---------------------------------------------------


def make_interval_x(p=2):
    """Three vertices, two edges in a row: v0 -e0- v1 -e1- v2."""
    return CellComplex.build(
        [("v0", 0), ("v1", 0), ("v2", 0), ("e0", 1), ("e1", 1)],
        {"e0": [("v0", 1), ("v1", 1)], "e1": [("v1", 1), ("v2", 1)]},
        p=p,
    )


def make_vee_poset():
    """p and r below q."""
    return Poset(["p", "q", "r"], [("p", "q"), ("r", "q")])


def make_interval_graded(p=2):
    X = make_interval_x(p)
    P = make_vee_poset()
    nu = {"v0": "p", "v2": "r", "v1": "q", "e0": "q", "e1": "q"}
    return GradedComplex(X, P, nu)


def make_reduced_interval(p=2):
    """The compressed form: two vertices, one edge joining them."""
    X = CellComplex.build(
        [("v0", 0), ("v1", 0), ("e0", 1)],
        {"e0": [("v0", 1), ("v1", 1)]},
        p=p,
    )
    P = make_vee_poset()
    return GradedComplex(X, P, {"v0": "p", "v1": "r", "e0": "q"})


def make_strip_and_hole(p=2):
    """The 3x2 open-right grid X, the middle edge's star, and K = X - star.

    K is the closed strip with 9 vertices, 14 edges, 4 squares; the star
    holds the two middle squares and the edge between them.
    """
    X = grid_complex((3, 2), p=p, open_axes=[0])
    geom = X.cubes
    middle_edge = int(geom.encode(np.array([1, 1]), 1))
    star = X.star(middle_edge)
    K = X.restrict(set(X.ids()) - star, check_convex=False)
    return X, K, star


def make_strip_graded(p=2):
    """Two-level grading: 1 on the middle star, 0 on the closed strip."""
    X, K, star = make_strip_and_hole(p)
    grade = np.zeros(X.n, dtype=np.int32)
    for c in star:
        grade[X.index(c)] = 1
    Q = Poset([0, 1], [(0, 1)])
    return GradedComplex(X, Q, grade)


def make_torus(p=2):
    """4x4 periodic cubical torus over GF(2): 16 vertices, 32 edges, 16 squares."""
    assert p == 2, "periodic incidence signs are only set up mod 2"
    n = 4
    cells = []
    boundary = {}
    for i in range(n):
        for j in range(n):
            cells.append((f"v{i}{j}", 0))
    for i in range(n):
        for j in range(n):
            cells.append((f"h{i}{j}", 1))
            boundary[f"h{i}{j}"] = [(f"v{i}{j}", 1), (f"v{(i + 1) % n}{j}", 1)]
            cells.append((f"u{i}{j}", 1))
            boundary[f"u{i}{j}"] = [(f"v{i}{j}", 1), (f"v{i}{(j + 1) % n}", 1)]
    for i in range(n):
        for j in range(n):
            cells.append((f"s{i}{j}", 2))
            boundary[f"s{i}{j}"] = [
                (f"h{i}{j}", 1),
                (f"h{i}{(j + 1) % n}", 1),
                (f"u{i}{j}", 1),
                (f"u{(i + 1) % n}{j}", 1),
            ]
    return CellComplex.build(cells, boundary, p=p)


def make_circle(p=2):
    """Two vertices, two parallel edges."""
    return CellComplex.build(
        [("a", 0), ("b", 0), ("e", 1), ("f", 1)],
        {"e": [("a", 1), ("b", 1)], "f": [("a", 1), ("b", 1)]},
        p=p,
    )


# -- random generators --------------------------------------------------------


def random_simplicial(rng: np.random.Generator, n_verts: int = 8, p: int = 2,
                      edge_prob: float = 0.5, tri_prob: float = 0.5) -> CellComplex:
    """Random 2-dimensional simplicial complex with signed boundaries."""
    verts = [("v%d" % i, 0) for i in range(n_verts)]
    cells = list(verts)
    boundary = {}
    edges = {}
    for i in range(n_verts):
        for j in range(i + 1, n_verts):
            if rng.random() < edge_prob:
                name = "e%d_%d" % (i, j)
                edges[(i, j)] = name
                cells.append((name, 1))
                boundary[name] = [("v%d" % i, p - 1), ("v%d" % j, 1)]
    for i in range(n_verts):
        for j in range(i + 1, n_verts):
            for k in range(j + 1, n_verts):
                if (i, j) in edges and (j, k) in edges and (i, k) in edges:
                    if rng.random() < tri_prob:
                        name = "t%d_%d_%d" % (i, j, k)
                        cells.append((name, 2))
                        boundary[name] = [
                            (edges[(j, k)], 1),
                            (edges[(i, k)], p - 1),
                            (edges[(i, j)], 1),
                        ]
    return CellComplex.build(cells, boundary, p=p)


def random_graded(rng: np.random.Generator, n_verts: int = 8, p: int = 2,
                  n_labels: int = 3, max_elems: int = 5) -> GradedComplex:
    """Random graded complex via the star-label construction.

    Top cells get random labels; each cell is graded by the set of labels in
    its star, and those sets ordered by reverse inclusion form the poset.
    Retries until the poset is small enough.
    """
    while True:
        X = random_simplicial(rng, n_verts=n_verts, p=p)
        tops = sorted(X.top_cells(), key=str)
        lab = {t: int(rng.integers(0, n_labels)) for t in tops}
        sets = {}
        for i in range(X.n):
            cell = X.id_of(i)
            sets[cell] = frozenset(lab[t] for t in X.star(cell) if t in lab)
        elems = sorted(set(sets.values()), key=lambda s: (len(s), sorted(s)))
        if not elems or len(elems) > max_elems:
            continue
        name = {s: "+".join(map(str, sorted(s))) or "none" for s in elems}
        covers = []
        for a in elems:
            for b in elems:
                if a != b and b < a:  # reverse inclusion: bigger set is lower
                    if not any(c != a and c != b and b < c and c < a for c in elems):
                        covers.append((name[a], name[b]))
        P = Poset([name[s] for s in elems], covers)
        return GradedComplex(X, P, {c: name[s] for c, s in sets.items()})


def random_grid(rng: np.random.Generator, max_extent: int = 6, levels: int = 3):
    """Random 2-d grid with random labels and possibly open axes."""
    from conmat.cubical import CubicalGrid

    shape = (int(rng.integers(2, max_extent + 1)), int(rng.integers(2, max_extent + 1)))
    values = [int(v) for v in rng.integers(0, levels, size=shape[0] * shape[1])]
    open_axes = frozenset(int(a) for a in range(2) if rng.random() < 0.3)
    return CubicalGrid(shape, values, open_axes)


# -- dense checking helpers ---------------------------------------------------


def dense_boundary_by_dim(X: CellComplex):
    """Dense del as one n x n matrix over the full basis."""
    ids = X.ids()
    return assemble(lambda ch: X.boundary(ch), ids, ids, X.p), ids


def check_reduction_identities(r, require_perfect=None):
    """Verify the three reduction identities and del^2 = 0 by dense assembly."""
    p = r.source.p
    src = r.source.ids()
    dst = r.target.ids()
    psi = assemble(r.psi, src, dst, p)
    phi = assemble(r.phi, dst, src, p)
    gam = assemble(r.gamma, src, src, p)
    d_src = assemble(lambda ch: r.source.boundary(ch), src, src, p)
    d_dst = assemble(lambda ch: r.target.boundary(ch), dst, dst, p)
    eye_dst = np.eye(len(dst), dtype=np.int64)
    eye_src = np.eye(len(src), dtype=np.int64)
    assert ((psi @ phi) % p == eye_dst).all(), "psi phi != id"
    lhs = (phi @ psi) % p
    rhs = (eye_src - (gam @ d_src + d_src @ gam)) % p
    assert (lhs == rhs).all(), "phi psi != id - (gamma del + del gamma)"
    assert ((gam @ gam) % p == 0).all(), "gamma^2 != 0"
    assert ((gam @ phi) % p == 0).all(), "gamma phi != 0"
    assert ((psi @ gam) % p == 0).all(), "psi gamma != 0"
    assert ((d_dst @ d_dst) % p == 0).all(), "target del^2 != 0"
    assert ((psi @ d_src) % p == (d_dst @ psi) % p).all(), "psi not a chain map"
    assert ((d_src @ phi) % p == (phi @ d_dst) % p).all(), "phi not a chain map"
    assert ((psi @ d_src @ phi) % p == d_dst).all(), "target boundary != psi del phi"
