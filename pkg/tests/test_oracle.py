import numpy as np
import pytest

from conmat import CellComplex, GradedComplex
from conmat.linalg import kernel_basis, rank as linalg_rank
from conmat.oracle import (
    SIZE_CAP,
    assemble,
    dense_homology,
    dense_persistent_betti,
    full_boundary_matrix,
    oracle_rank,
)
from conmat.order import chain_poset

from conftest import make_circle, make_interval_x, make_strip_and_hole, make_torus


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("seed", range(4))
def test_rank_pivot_order_self_consistency(p, seed):
    rng = np.random.default_rng(seed)
    mat = rng.integers(0, p, size=(12, 9))
    assert oracle_rank(mat, p) == oracle_rank(mat, p, reverse=True)
    assert oracle_rank(mat, p) == linalg_rank(mat, p)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_kernel_basis_against_oracle(p):
    rng = np.random.default_rng(99)
    mat = rng.integers(0, p, size=(7, 11))
    K = kernel_basis(mat, p)
    assert ((mat @ K) % p == 0).all()
    assert linalg_rank(K, p) == K.shape[1]
    assert K.shape[1] == 11 - oracle_rank(mat, p)


def test_dense_homology_examples():
    _, K, _ = make_strip_and_hole()
    assert dense_homology(K) == {1: 1}
    point = CellComplex.build([("v", 0)], {})
    assert dense_homology(point) == {0: 1}
    # hand elimination of the interval's del_1 gives rank 2: one component
    X = make_interval_x()
    d1 = full_boundary_matrix(X, 1)
    assert oracle_rank(d1, 2) == 2
    assert dense_homology(X) == {0: 1}
    assert dense_homology(make_circle()) == {0: 1, 1: 1}
    assert dense_homology(make_torus()) == {0: 1, 1: 2, 2: 1}


def test_dense_persistent_betti_examples():
    X = make_interval_x()
    Q = chain_poset([0, 1, 2])
    mu = {"v0": 0, "v2": 1, "v1": 2, "e0": 2, "e1": 2}
    g = GradedComplex(X, Q, mu)
    assert dense_persistent_betti(g, frozenset({0}), frozenset({0, 1}), 0) == 1
    for k in range(3):
        a = frozenset(range(k + 1))
        betti = dense_homology(g.filtered_piece(a))
        for j in range(2):
            assert dense_persistent_betti(g, a, a, j) == betti.get(j, 0)


def test_dense_persistent_betti_disjoint_union_doubles():
    def two_points(tag):
        return [(f"{tag}a", 0), (f"{tag}b", 0)], {}

    cells1, b1 = two_points("x")
    X1 = CellComplex.build(cells1, b1)
    cells2, _ = two_points("y")
    X2 = CellComplex.build(cells1 + cells2, b1)
    Q = chain_poset([0])
    g1 = GradedComplex(X1, Q, {c: 0 for c, _ in cells1})
    g2 = GradedComplex(X2, Q, {c: 0 for c, _ in cells1 + cells2})
    a = frozenset({0})
    assert dense_persistent_betti(g2, a, a, 0) == 2 * dense_persistent_betti(g1, a, a, 0)


def test_assemble_identity_and_caps():
    X = make_interval_x()
    ids = X.ids()
    eye = assemble(lambda c: c, ids, ids, 2)
    assert (eye == np.eye(len(ids), dtype=np.int64)).all()
    with pytest.raises(ValueError, match="size cap"):
        assemble(lambda c: c, list(range(SIZE_CAP + 1)), [], 2)


def test_dense_homology_cap():
    cells = [("v%d" % i, 0) for i in range(SIZE_CAP + 1)]
    X = CellComplex.build(cells, {})
    with pytest.raises(ValueError, match="size cap"):
        dense_homology(X)
